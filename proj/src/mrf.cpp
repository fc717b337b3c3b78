#include "mimo/mrf.hpp"

#include <cmath>

namespace mimo {

PairwiseMrf build_mrf(const MimoInstance& inst, const Alphabet& a,
                      const Eigen::Ref<const Mat>& log_prior) {
  if (inst.sigma2 <= 0.0) {
    throw ZeroNoiseVariance("build_mrf: sigma^2 must be positive");
  }
  const int n_t = static_cast<int>(inst.H.cols());
  const int k = a.size();
  if (log_prior.rows() != n_t || log_prior.cols() != k) {
    throw ShapeMismatch("build_mrf: prior shape does not match N_t x |A|");
  }
  for (int i = 0; i < n_t; ++i) {
    if (std::abs(logsumexp(log_prior.row(i).transpose())) > 1e-9) {
      throw Error("build_mrf: prior row " + std::to_string(i) +
                  " is not a normalized log-probability");
    }
  }

  PairwiseMrf mrf;
  mrf.alphabet = a;
  mrf.log_prior = log_prior;

  const Mat gram = inst.H.transpose() * inst.H;
  const Vec yh = inst.H.transpose() * inst.y;

  mrf.log_pair_coeff = -gram / inst.sigma2;
  mrf.log_pair_coeff.diagonal().setZero();

  mrf.log_self.resize(n_t, k);
  for (int i = 0; i < n_t; ++i) {
    for (int s = 0; s < k; ++s) {
      const double lvl = a.levels[s];
      mrf.log_self(i, s) =
          (yh[i] * lvl - 0.5 * gram(i, i) * lvl * lvl) / inst.sigma2 +
          log_prior(i, s);
    }
  }
  return mrf;
}

Mat uniform_log_prior(int n_t, const Alphabet& a) {
  return Mat::Constant(n_t, a.size(), -std::log(double(a.size())));
}

double mrf_log_density(const PairwiseMrf& mrf,
                       std::span<const int> assignment) {
  const int n_t = mrf.n_nodes();
  if (static_cast<int>(assignment.size()) != n_t) {
    throw ShapeMismatch("mrf_log_density: assignment length != n_nodes");
  }
  double acc = 0.0;
  for (int i = 0; i < n_t; ++i) {
    acc += mrf.log_self(i, assignment[i]);
    const double si = mrf.alphabet.levels[assignment[i]];
    for (int j = i + 1; j < n_t; ++j) {
      acc += mrf.log_pair_coeff(i, j) * si * mrf.alphabet.levels[assignment[j]];
    }
  }
  return acc;
}

}  // namespace mimo
