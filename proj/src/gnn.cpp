#include "mimo/gnn.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace mimo {

std::string variant_name(GnnVariant v) {
  return v == GnnVariant::MmsePrior ? "mmse" : "plain";
}

GnnVariant variant_from_name(const std::string& name) {
  if (name == "plain") {
    return GnnVariant::Plain;
  }
  if (name == "mmse") {
    return GnnVariant::MmsePrior;
  }
  throw Error("unknown variant '" + name + "' (expected plain or mmse)");
}

void validate(const GnnArch& arch) {
  if (arch.hidden < 2 || arch.state < 1 || arch.message < 1 ||
      arch.iterations < 0 || arch.alphabet_size < 2) {
    throw ShapeMismatch("GnnArch: sizes must be positive");
  }
  if (arch.message != arch.state) {
    throw ShapeMismatch("GnnArch: S_m must equal S_u");
  }
  if (arch.dropout_m < 0 || arch.dropout_m >= 1 || arch.dropout_r < 0 ||
      arch.dropout_r >= 1) {
    throw ShapeMismatch("GnnArch: dropout rates must lie in [0, 1)");
  }
}

bool operator==(const GnnArch& a, const GnnArch& b) {
  return a.variant == b.variant && a.hidden == b.hidden && a.state == b.state &&
         a.message == b.message && a.iterations == b.iterations &&
         a.alphabet_size == b.alphabet_size;
}

GnnParameters zero_params(const GnnArch& arch) {
  const int l = arch.hidden;
  const int lh = arch.hidden_half();
  const int su = arch.state;
  const int sm = arch.message;
  const int k = arch.alphabet_size;
  GnnParameters p;
  p.enc_W = Mat::Zero(su, arch.node_feature_size());
  p.enc_b = Mat::Zero(su, 1);
  p.m_W1 = Mat::Zero(l, 2 * su + arch.edge_feature_size());
  p.m_b1 = Mat::Zero(l, 1);
  p.m_W2 = Mat::Zero(lh, l);
  p.m_b2 = Mat::Zero(lh, 1);
  p.m_W3 = Mat::Zero(sm, lh);
  p.m_b3 = Mat::Zero(sm, 1);
  for (Mat* w : {&p.gru_Wr, &p.gru_Wz, &p.gru_Wn}) {
    *w = Mat::Zero(l, arch.gru_input_size());
  }
  for (Mat* u : {&p.gru_Ur, &p.gru_Uz, &p.gru_Un}) {
    *u = Mat::Zero(l, l);
  }
  for (Mat* b : {&p.gru_br, &p.gru_bz, &p.gru_bn}) {
    *b = Mat::Zero(l, 1);
  }
  p.proj_W = Mat::Zero(su, l);
  p.proj_b = Mat::Zero(su, 1);
  p.r_W1 = Mat::Zero(l, su);
  p.r_b1 = Mat::Zero(l, 1);
  p.r_W2 = Mat::Zero(lh, l);
  p.r_b2 = Mat::Zero(lh, 1);
  p.r_W3 = Mat::Zero(k, lh);
  p.r_b3 = Mat::Zero(k, 1);
  return p;
}

void validate(const GnnParameters& params, const GnnArch& arch) {
  const GnnParameters ref = zero_params(arch);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> expected;
  ref.for_each([&](const char*, const Mat& m) {
    expected.emplace_back(m.rows(), m.cols());
  });
  std::size_t idx = 0;
  params.for_each([&](const char* name, const Mat& m) {
    if (m.rows() != expected[idx].first || m.cols() != expected[idx].second) {
      throw ShapeMismatch(std::string("GnnParameters: tensor ") + name +
                          " does not match the architecture");
    }
    ++idx;
  });
}

GraphFeatures build_features(const MimoInstance& inst, GnnVariant variant) {
  const int n_t = static_cast<int>(inst.H.cols());
  const Mat gram = inst.H.transpose() * inst.H;
  const Vec yh = inst.H.transpose() * inst.y;
  const double s2 = inst.sigma2;

  GraphFeatures feat;
  if (variant == GnnVariant::MmsePrior) {
    feat.mmse = mmse_estimate(inst);
    feat.node_init.resize(n_t, 5);
    for (int i = 0; i < n_t; ++i) {
      feat.node_init.row(i) << feat.mmse->z[i], feat.mmse->C(i, i), yh[i],
          gram(i, i), s2;
    }
    feat.edge_feat = Mat::Zero(n_t * n_t, 3);
    for (int i = 0; i < n_t; ++i) {
      for (int j = 0; j < n_t; ++j) {
        if (i != j) {
          feat.edge_feat.row(i * n_t + j) << feat.mmse->rho(i, j), -gram(i, j),
              s2;
        }
      }
    }
  } else {
    feat.node_init.resize(n_t, 3);
    for (int i = 0; i < n_t; ++i) {
      feat.node_init.row(i) << yh[i], gram(i, i), s2;
    }
    feat.edge_feat = Mat::Zero(n_t * n_t, 2);
    for (int i = 0; i < n_t; ++i) {
      for (int j = 0; j < n_t; ++j) {
        if (i != j) {
          feat.edge_feat.row(i * n_t + j) << -gram(i, j), s2;
        }
      }
    }
  }
  return feat;
}

Mat encode_nodes(const GraphFeatures& feat, const GnnParameters& params) {
  if (params.enc_W.cols() != feat.node_init.cols()) {
    throw ShapeMismatch("encode_nodes: encoder width != feature size");
  }
  return (feat.node_init * params.enc_W.transpose()).rowwise() +
         params.enc_b.col(0).transpose();
}

namespace {

// Inverted dropout: zero with probability `rate`, else scale by 1/(1-rate).
Mat dropout_mask(RngStream& rng, Eigen::Index rows, Eigen::Index cols,
                 double rate) {
  Mat mask(rows, cols);
  const double keep = 1.0 - rate;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      mask(i, j) = rng.next_double() < rate ? 0.0 : 1.0 / keep;
    }
  }
  return mask;
}

}  // namespace

Mat propagate(const Eigen::Ref<const Mat>& u, const GraphFeatures& feat,
              const GnnParameters& params, const GnnArch& arch, RngStream* rng,
              bool train_mode) {
  const int n_t = feat.n_nodes();
  const int ef = arch.edge_feature_size();
  const int su = arch.state;
  const int n_edges = n_t * (n_t - 1);

  Mat input(n_edges, 2 * su + ef);
  int e = 0;
  for (int i = 0; i < n_t; ++i) {
    for (int j = 0; j < n_t; ++j) {
      if (i == j) {
        continue;
      }
      input.row(e) << u.row(i), u.row(j), feat.edge_feat.row(i * n_t + j);
      ++e;
    }
  }

  Mat h1 = ((input * params.m_W1.transpose()).rowwise() +
            params.m_b1.col(0).transpose())
               .cwiseMax(0.0);
  if (train_mode && arch.dropout_m > 0.0) {
    if (rng == nullptr) {
      throw Error("propagate: training mode requires an rng");
    }
    h1.array() *= dropout_mask(*rng, h1.rows(), h1.cols(), arch.dropout_m).array();
  }
  Mat h2 = ((h1 * params.m_W2.transpose()).rowwise() +
            params.m_b2.col(0).transpose())
               .cwiseMax(0.0);
  Mat out = (h2 * params.m_W3.transpose()).rowwise() +
            params.m_b3.col(0).transpose();

  Mat messages = Mat::Zero(n_t * n_t, arch.message);
  e = 0;
  for (int i = 0; i < n_t; ++i) {
    for (int j = 0; j < n_t; ++j) {
      if (i == j) {
        continue;
      }
      messages.row(i * n_t + j) = out.row(e++);
    }
  }
  return messages;
}

std::pair<Mat, Mat> aggregate(const Eigen::Ref<const Mat>& u_prev,
                              const Eigen::Ref<const Mat>& hidden_prev,
                              const Eigen::Ref<const Mat>& messages,
                              const GnnParameters& params) {
  const int n_t = static_cast<int>(u_prev.rows());
  const int sm = static_cast<int>(params.m_W3.rows());
  if (messages.rows() != n_t * n_t || messages.cols() != sm) {
    throw ShapeMismatch("aggregate: message tensor has wrong shape");
  }
  if (hidden_prev.rows() != n_t || hidden_prev.cols() != params.gru_Ur.rows()) {
    throw ShapeMismatch("aggregate: hidden state has wrong shape");
  }

  Mat summed = Mat::Zero(n_t, sm);
  for (int j = 0; j < n_t; ++j) {
    for (int i = 0; i < n_t; ++i) {
      if (i != j) {
        summed.row(j) += messages.row(i * n_t + j);
      }
    }
  }

  Mat x(n_t, u_prev.cols() + sm);
  x << u_prev, summed;

  auto gate = [&](const Mat& W, const Mat& U, const Mat& b,
                  const Mat& h) -> Mat {
    return ((x * W.transpose() + h * U.transpose()).rowwise() +
            b.col(0).transpose());
  };
  Mat r = gate(params.gru_Wr, params.gru_Ur, params.gru_br, hidden_prev)
              .unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  Mat z = gate(params.gru_Wz, params.gru_Uz, params.gru_bz, hidden_prev)
              .unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  Mat rh = r.cwiseProduct(hidden_prev);
  Mat n = ((x * params.gru_Wn.transpose() + rh * params.gru_Un.transpose())
               .rowwise() +
           params.gru_bn.col(0).transpose())
              .array()
              .tanh();
  Mat hidden_next =
      (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(hidden_prev);
  Mat u_next = (hidden_next * params.proj_W.transpose()).rowwise() +
               params.proj_b.col(0).transpose();
  return {std::move(u_next), std::move(hidden_next)};
}

Mat readout(const Eigen::Ref<const Mat>& u_final, const GnnParameters& params,
            const GnnArch& arch, RngStream* rng, bool train_mode) {
  Mat h1 = ((u_final * params.r_W1.transpose()).rowwise() +
            params.r_b1.col(0).transpose())
               .cwiseMax(0.0);
  if (train_mode && arch.dropout_r > 0.0) {
    if (rng == nullptr) {
      throw Error("readout: training mode requires an rng");
    }
    h1.array() *= dropout_mask(*rng, h1.rows(), h1.cols(), arch.dropout_r).array();
  }
  Mat h2 = ((h1 * params.r_W2.transpose()).rowwise() +
            params.r_b2.col(0).transpose())
               .cwiseMax(0.0);
  Mat logits = (h2 * params.r_W3.transpose()).rowwise() +
               params.r_b3.col(0).transpose();
  Mat probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    probs.row(i) = softmax(logits.row(i).transpose()).transpose();
  }
  return probs;
}

DetectionResult gnn_forward(const MimoInstance& inst,
                            const GnnParameters& params, const GnnArch& arch,
                            const Alphabet& a, RngStream* rng,
                            bool train_mode) {
  validate(arch);
  validate(params, arch);
  if (a.size() != arch.alphabet_size) {
    throw ShapeMismatch("gnn_forward: alphabet does not match architecture");
  }
  const GraphFeatures feat = build_features(inst, arch.variant);
  Mat u = encode_nodes(feat, params);
  Mat hidden = Mat::Zero(feat.n_nodes(), arch.hidden);
  for (int t = 0; t < arch.iterations; ++t) {
    Mat messages = propagate(u, feat, params, arch, rng, train_mode);
    std::tie(u, hidden) = aggregate(u, hidden, messages, params);
  }
  Mat probs = readout(u, params, arch, rng, train_mode);
  return make_detection_result(std::move(probs), a, arch.detector_label());
}

}  // namespace mimo
