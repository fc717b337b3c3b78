#include "mimo/detectors.hpp"

#include <cmath>
#include <limits>

namespace mimo {

namespace {

// log(d * exp(a) + (1 - d) * exp(b)) without leaving the log domain.
double log_mix(double log_d, double log_1md, double a, double b) {
  const double x = log_d + a;
  const double y = log_1md + b;
  const double m = std::max(x, y);
  if (!std::isfinite(m)) {
    return m;
  }
  return m + std::log(std::exp(x - m) + std::exp(y - m));
}

void normalize_log_row(Eigen::Ref<Eigen::RowVectorXd> row) {
  row.array() -= logsumexp(row.transpose());
}

void check_finite_log(const Mat& m, const char* what) {
  // -inf is a legitimate zero probability; NaN or +inf signals divergence.
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw NonFiniteMessage(std::string("bp_detect: non-finite ") + what);
      }
    }
  }
}

}  // namespace

DetectionResult make_detection_result(Mat probs, const Alphabet& a,
                                      std::string detector) {
  const int n = static_cast<int>(probs.rows());
  DetectionResult res;
  res.soft.resize(n);
  res.hard_idx.resize(n);
  Eigen::Map<const Vec> levels(a.levels.data(), a.size());
  for (int i = 0; i < n; ++i) {
    res.soft[i] = probs.row(i).dot(levels);
    int best = 0;
    probs.row(i).maxCoeff(&best);
    res.hard_idx[i] = best;
  }
  res.probs = std::move(probs);
  res.detector = std::move(detector);
  return res;
}

MmseOutput mmse_estimate(const MimoInstance& inst) {
  const int n_t = static_cast<int>(inst.H.cols());
  Mat A = inst.H.transpose() * inst.H;
  A.diagonal().array() += inst.sigma2;
  MmseOutput out;
  out.z = sym_posdef_solve(A, inst.H.transpose() * inst.y);
  out.C = inst.sigma2 * sym_posdef_solve(A, Mat::Identity(n_t, n_t));
  out.C = 0.5 * (out.C + out.C.transpose().eval());
  out.rho.resize(n_t, n_t);
  for (int i = 0; i < n_t; ++i) {
    for (int j = 0; j < n_t; ++j) {
      out.rho(i, j) = out.C(i, j) * out.C(i, j) / (out.C(i, i) * out.C(j, j));
    }
  }
  return out;
}

DetectionResult mmse_detect(const MimoInstance& inst, const Alphabet& a) {
  const MmseOutput est = mmse_estimate(inst);
  const int n_t = static_cast<int>(est.z.size());
  const int k = a.size();
  Mat probs(n_t, k);
  for (int l = 0; l < n_t; ++l) {
    Vec score(k);
    for (int s = 0; s < k; ++s) {
      const double d = a.levels[s] - est.z[l];
      score[s] = -d * d / (2.0 * est.C(l, l));
    }
    probs.row(l) = softmax(score).transpose();
  }
  DetectionResult res = make_detection_result(std::move(probs), a, "mmse");
  // Slicing z directly agrees with the probability argmax, ties included.
  for (int l = 0; l < n_t; ++l) {
    res.hard_idx[l] = hard_slice(est.z[l], a);
  }
  return res;
}

DetectionResult bp_detect(const PairwiseMrf& mrf, const BpConfig& cfg) {
  if (cfg.iterations < 1 || cfg.damping < 0.0 || cfg.damping >= 1.0) {
    throw Error("bp_detect: invalid configuration");
  }
  const int n = mrf.n_nodes();
  const int k = mrf.alphabet.size();
  Eigen::Map<const Vec> levels(mrf.alphabet.levels.data(), k);

  const Mat likelihood = mrf.log_self - mrf.log_prior;
  Mat prior = mrf.log_prior;

  // messages.row(i * n + j) is log m_{i->j}, a distribution over x_j.
  Mat messages = Mat::Constant(n * n, k, -std::log(double(k)));
  Mat beliefs = Mat::Zero(n, k);

  const double log_d = std::log(cfg.damping);
  const double log_1md = std::log1p(-cfg.damping);

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const Mat lphi = likelihood + prior;

    // Sum of incoming log-messages per node, over the complete neighborhood.
    Mat incoming = Mat::Zero(n, k);
    for (int i = 0; i < n; ++i) {
      for (int src = 0; src < n; ++src) {
        if (src != i) {
          incoming.row(i) += messages.row(src * n + i);
        }
      }
    }

    Mat updated(n * n, k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) {
          continue;
        }
        // Evidence at node i excluding what j itself sent.
        const Eigen::RowVectorXd base = lphi.row(i) + incoming.row(i) -
                                        messages.row(j * n + i);
        const double coeff = mrf.log_pair_coeff(i, j);
        Eigen::RowVectorXd msg(k);
        for (int sj = 0; sj < k; ++sj) {
          Vec terms = base.transpose() + coeff * levels[sj] * levels;
          msg[sj] = logsumexp(terms);
        }
        normalize_log_row(msg);
        if (iter > 1 && cfg.damping > 0.0) {
          const Eigen::RowVectorXd old = messages.row(i * n + j);
          for (int sj = 0; sj < k; ++sj) {
            msg[sj] = log_mix(log_d, log_1md, old[sj], msg[sj]);
          }
          normalize_log_row(msg);
        }
        updated.row(i * n + j) = msg;
      }
    }
    messages = std::move(updated);
    check_finite_log(messages, "message");

    Mat new_beliefs(n, k);
    for (int i = 0; i < n; ++i) {
      Eigen::RowVectorXd b = lphi.row(i);
      for (int src = 0; src < n; ++src) {
        if (src != i) {
          b += messages.row(src * n + i);
        }
      }
      normalize_log_row(b);
      if (iter > 1 && cfg.damping > 0.0) {
        for (int s = 0; s < k; ++s) {
          b[s] = log_mix(log_d, log_1md, beliefs(i, s), b[s]);
        }
        normalize_log_row(b);
      }
      new_beliefs.row(i) = b;
    }
    beliefs = std::move(new_beliefs);
    check_finite_log(beliefs, "belief");

    if (cfg.prior_feedback) {
      prior = beliefs;
    }
  }

  return make_detection_result(beliefs.array().exp(), mrf.alphabet, "bp");
}

std::vector<int> ml_oracle(const MimoInstance& inst, const Alphabet& a) {
  const int n_t = static_cast<int>(inst.H.cols());
  const int k = a.size();
  double total = 1.0;
  for (int i = 0; i < n_t; ++i) {
    total *= k;
    if (total > double(1 << 20)) {
      throw TooLarge("ml_oracle: |A|^N_t exceeds 2^20 configurations");
    }
  }

  std::vector<int> assignment(n_t, 0);
  std::vector<int> best = assignment;
  double best_cost = std::numeric_limits<double>::infinity();
  Vec x(n_t);
  while (true) {
    for (int i = 0; i < n_t; ++i) {
      x[i] = a.levels[assignment[i]];
    }
    const double cost = (inst.H * x - inst.y).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best = assignment;
    }
    int pos = 0;
    while (pos < n_t && ++assignment[pos] == k) {
      assignment[pos] = 0;
      ++pos;
    }
    if (pos == n_t) {
      break;
    }
  }
  return best;
}

}  // namespace mimo
