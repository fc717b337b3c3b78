#include "mimo/constellation.hpp"

#include <cmath>

namespace mimo {

Alphabet build_alphabet(int M) {
  if (M != 4 && M != 16 && M != 64) {
    throw UnsupportedOrder("build_alphabet: M must be 4, 16 or 64, got " +
                           std::to_string(M));
  }
  const int k = static_cast<int>(std::lround(std::sqrt(double(M))));
  // Mean square of the odd-integer grid {+-1, +-3, ...} is (k^2 - 1) / 3.
  const double scale = std::sqrt(3.0 / (double(k) * k - 1.0));
  Alphabet a;
  a.qam_order = M;
  a.scale = scale;
  a.levels.resize(k);
  for (int i = 0; i < k; ++i) {
    a.levels[i] = scale * (2 * i - (k - 1));
  }
  return a;
}

int hard_slice(double v, const Alphabet& a) {
  int best = 0;
  double best_dist = std::abs(v - a.levels[0]);
  for (int i = 1; i < a.size(); ++i) {
    const double d = std::abs(v - a.levels[i]);
    if (d < best_dist) {  // strict: ties keep the smaller level
      best_dist = d;
      best = i;
    }
  }
  return best;
}

Vec one_hot(int idx, const Alphabet& a) {
  if (idx < 0 || idx >= a.size()) {
    throw IndexOutOfRange("one_hot: index " + std::to_string(idx) +
                          " outside alphabet of size " +
                          std::to_string(a.size()));
  }
  Vec p = Vec::Zero(a.size());
  p[idx] = 1.0;
  return p;
}

double symbol_error_rate(std::span<const int> truth,
                         std::span<const int> detected) {
  if (truth.size() != detected.size() || truth.empty()) {
    throw LengthMismatch("symbol_error_rate: lists must be equal and nonempty");
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    errors += (truth[i] != detected[i]) ? 1 : 0;
  }
  return static_cast<double>(errors) / static_cast<double>(truth.size());
}

}  // namespace mimo
