#pragma once

#include <span>
#include <vector>

#include "mimo/numerics.hpp"

namespace mimo {

//! Real-valued amplitude alphabet of a square M-QAM constellation, normalized
//! to unit average energy per real symbol.
struct Alphabet {
  int qam_order = 0;           // M
  std::vector<double> levels;  // sqrt(M) values, sorted ascending
  double scale = 0.0;          // spacing factor applied to odd integers

  int size() const { return static_cast<int>(levels.size()); }
};

//! Levels {-(sqrt(M)-1), ..., -1, +1, ..., +(sqrt(M)-1)} scaled so the mean
//! square equals one. Supported orders: 4, 16, 64.
Alphabet build_alphabet(int M);

//! Index of the level nearest to v; exact ties go to the smaller level.
int hard_slice(double v, const Alphabet& a);

//! Probability vector with unit mass at `idx`.
Vec one_hot(int idx, const Alphabet& a);

//! Fraction of positions where the index lists differ.
double symbol_error_rate(std::span<const int> truth,
                         std::span<const int> detected);

}  // namespace mimo
