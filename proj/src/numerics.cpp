#include "mimo/numerics.hpp"

#include <cmath>
#include <limits>

namespace mimo {

namespace {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

void require_symmetric(const Eigen::Ref<const Mat>& A, const char* who) {
  if (A.rows() != A.cols()) {
    throw NotSymmetric(std::string(who) + ": matrix is not square");
  }
  const double scale = A.cwiseAbs().maxCoeff();
  const double tol = 1e-10 * std::max(scale, 1.0);
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw NotSymmetric(std::string(who) + ": matrix is not symmetric");
  }
}

}  // namespace

std::uint64_t RngStream::init_state(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + kGolden * mix64(stream + kGolden));
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(seed_, mix64(stream_ + kGolden * (index + 1)));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_gaussian_ = v * f;
  has_cached_gaussian_ = true;
  return u * f;
}

Vec gaussian(RngStream& rng, int n, double mean, double std_dev) {
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = mean + std_dev * rng.next_gaussian();
  }
  return out;
}

Mat sym_posdef_solve(const Eigen::Ref<const Mat>& A,
                     const Eigen::Ref<const Mat>& B) {
  require_symmetric(A, "sym_posdef_solve");
  if (A.rows() != B.rows()) {
    throw ShapeMismatch("sym_posdef_solve: A and B row counts differ");
  }
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("sym_posdef_solve: Cholesky failed");
  }
  return llt.solve(B);
}

Mat sym_sqrt(const Eigen::Ref<const Mat>& A) {
  require_symmetric(A, "sym_sqrt");
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success) {
    throw Error("sym_sqrt: eigendecomposition failed");
  }
  Vec roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Mat S = es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
  // Exact symmetry of the result, independent of rounding above.
  return 0.5 * (S + S.transpose());
}

Vec softmax(const Eigen::Ref<const Vec>& z) {
  const double m = z.maxCoeff();
  Vec e = (z.array() - m).exp();
  return e / e.sum();
}

double logsumexp(const Eigen::Ref<const Vec>& z) {
  const double m = z.maxCoeff();
  if (!std::isfinite(m)) {
    // All -inf: the sum is zero mass.
    return m;
  }
  double acc = 0.0;
  for (int i = 0; i < z.size(); ++i) {
    acc += std::exp(z[i] - m);
  }
  return m + std::log(acc);
}

}  // namespace mimo
