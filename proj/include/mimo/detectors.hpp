#pragma once

#include <string>
#include <vector>

#include "mimo/mrf.hpp"

namespace mimo {

//! Linear MMSE estimate together with the quantities consumed by the
//! prior-enhanced GNN variant.
struct MmseOutput {
  Vec z;    // (H'H + sigma^2 I)^{-1} H'y
  Mat C;    // sigma^2 (H'H + sigma^2 I)^{-1}
  Mat rho;  // rho(i,j) = C(i,j)^2 / (C(i,i) C(j,j))
};

struct BpConfig {
  int iterations = 8;
  double damping = 0.75;  // weight on the old value, probability domain
  bool prior_feedback = true;
};

//! Per-symbol posterior approximations plus derived soft and hard decisions.
struct DetectionResult {
  Mat probs;  // n_t x |A|, rows sum to one
  Vec soft;   // expected symbol values
  std::vector<int> hard_idx;
  std::string detector;
};

//! Builds a DetectionResult from probability rows; hard decisions are the
//! row argmax (first maximum on ties), soft values the row expectations.
DetectionResult make_detection_result(Mat probs, const Alphabet& a,
                                      std::string detector);

MmseOutput mmse_estimate(const MimoInstance& inst);

//! MMSE estimate followed by per-symbol Gaussian scoring with variance c_ll.
DetectionResult mmse_detect(const MimoInstance& inst, const Alphabet& a);

//! Damped sum-product belief propagation with a flooding schedule. Messages
//! and beliefs are mixed in the probability domain with weight `damping` on
//! the previous value; the first update is undamped. With prior_feedback the
//! prior factor inside the self potentials is replaced by the previous
//! iteration's belief.
DetectionResult bp_detect(const PairwiseMrf& mrf, const BpConfig& cfg);

//! Exhaustive MAP under a uniform prior (= maximum likelihood): argmin of
//! ||Hx - y||^2 over the full symbol lattice. Guarded to |A|^{N_t} <= 2^20.
std::vector<int> ml_oracle(const MimoInstance& inst, const Alphabet& a);

}  // namespace mimo
