#pragma once

#include "mimo/channel.hpp"
#include "mimo/constellation.hpp"
#include "mimo/numerics.hpp"

namespace mimo {

//! Log-domain pairwise Markov random field over the N_t transmitted symbols.
//! The pair potential along edge (i, j) is log_pair_coeff(i, j) * x_i * x_j;
//! self potentials already include the per-node prior.
struct PairwiseMrf {
  Alphabet alphabet;
  Mat log_self;        // n_t x |A|, likelihood term plus prior
  Mat log_pair_coeff;  // n_t x n_t, entry -h_i.h_j / sigma^2, diagonal zero
  Mat log_prior;       // n_t x |A|

  int n_nodes() const { return static_cast<int>(log_self.rows()); }
};

//! Self potential exponent (y'h_i s - h_i'h_i s^2 / 2) / sigma^2 plus the
//! given log-prior row; pair coefficients -h_i'h_j / sigma^2.
PairwiseMrf build_mrf(const MimoInstance& inst, const Alphabet& a,
                      const Eigen::Ref<const Mat>& log_prior);

//! Every entry -log |A|.
Mat uniform_log_prior(int n_t, const Alphabet& a);

//! Unnormalized log-density of one complete assignment (indices into the
//! alphabet); pair terms counted once per undirected edge.
double mrf_log_density(const PairwiseMrf& mrf, std::span<const int> assignment);

}  // namespace mimo
