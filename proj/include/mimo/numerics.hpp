#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "mimo/errors.hpp"

namespace mimo {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

//! Counter-based random stream. Identical (seed, stream) parameters yield an
//! identical sample sequence regardless of platform or thread layout; parallel
//! code derives disjoint child streams instead of sharing one generator.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), state_(init_state(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  //! Independent stream addressed by (seed, derived-id); order of derivation
  //! does not matter, only the index does.
  RngStream child(std::uint64_t index) const;

  std::uint64_t next_u64();

  //! Uniform in [0, 1) with 53 random bits.
  double next_double();

  //! Standard normal draw (Marsaglia polar method).
  double next_gaussian();

 private:
  static std::uint64_t init_state(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

//! Vector of i.i.d. N(mean, std^2) draws from `rng`.
Vec gaussian(RngStream& rng, int n, double mean, double std_dev);

//! Solves A X = B for symmetric positive definite A via Cholesky.
//! Throws NotSymmetric / NotPositiveDefinite.
Mat sym_posdef_solve(const Eigen::Ref<const Mat>& A,
                     const Eigen::Ref<const Mat>& B);

//! Symmetric square root of a symmetric PSD matrix: S with S*S ~= A.
//! Eigenvalues below zero are clamped to zero. Throws NotSymmetric.
Mat sym_sqrt(const Eigen::Ref<const Mat>& A);

//! Numerically stable softmax; preserves the argmax, output sums to one.
Vec softmax(const Eigen::Ref<const Vec>& z);

//! log(sum(exp(z))) with max subtraction; tolerates -inf entries.
double logsumexp(const Eigen::Ref<const Vec>& z);

}  // namespace mimo
