#pragma once

#include <cstdint>
#include <vector>

#include "mimo/constellation.hpp"
#include "mimo/numerics.hpp"

namespace mimo {

enum class ChannelKind { Iid, Kronecker };

//! Real-valued channel configuration. Dimensions are those of the stacked
//! real system, so both must be even and N_r >= N_t >= 2.
struct ChannelModel {
  ChannelKind kind = ChannelKind::Iid;
  double rho = 0.0;  // exponential correlation coefficient, Kronecker only
  int n_t = 0;
  int n_r = 0;
};

//! Validates the documented invariants; throws on violation.
void validate(const ChannelModel& model);

//! One detection problem y = H x + n with provenance for reconstruction.
struct MimoInstance {
  Mat H;                   // n_r x n_t
  Vec y;                   // n_r
  std::vector<int> x_idx;  // n_t true symbol indices
  double sigma2 = 0.0;
  double snr_db = 0.0;
  ChannelModel model;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

//! Noise variance from the SNR definition with E||Hx||^2 = N_t, which holds
//! for both supported channel models under unit-energy symbols.
double sigma2_from_snr(double snr_db, int n_t, int n_r);

//! Entries i.i.d. N(0, 1/N_r).
Mat gen_iid(RngStream& rng, int n_r, int n_t);

//! Entry (i, j) = rho^|i-j|.
Mat exp_corr_matrix(int n, double rho);

//! H = R_R^{1/2} K R_T^{1/2} with K i.i.d. N(0, 1/N_r) and exponential
//! correlation matrices on both sides.
Mat gen_kronecker(RngStream& rng, const ChannelModel& model);

//! Draws (x, H, n) from independent child streams and assembles the instance.
MimoInstance sample_instance(const RngStream& rng, const ChannelModel& model,
                             const Alphabet& a, double snr_db);

}  // namespace mimo
