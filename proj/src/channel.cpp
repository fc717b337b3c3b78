#include "mimo/channel.hpp"

#include <cmath>

namespace mimo {

void validate(const ChannelModel& model) {
  if (model.n_t < 2 || model.n_r < model.n_t) {
    throw ShapeMismatch("ChannelModel: require N_r >= N_t >= 2");
  }
  if (model.n_t % 2 != 0 || model.n_r % 2 != 0) {
    throw ShapeMismatch("ChannelModel: real-valued dimensions must be even");
  }
  if (model.rho < 0.0 || model.rho >= 1.0) {
    throw ShapeMismatch("ChannelModel: rho must lie in [0, 1)");
  }
}

double sigma2_from_snr(double snr_db, int n_t, int n_r) {
  return double(n_t) / (double(n_r) * std::pow(10.0, snr_db / 10.0));
}

Mat gen_iid(RngStream& rng, int n_r, int n_t) {
  const double std_dev = 1.0 / std::sqrt(double(n_r));
  Mat H(n_r, n_t);
  // Row-major fill order so the draw sequence matches the serialized layout.
  for (int i = 0; i < n_r; ++i) {
    for (int j = 0; j < n_t; ++j) {
      H(i, j) = std_dev * rng.next_gaussian();
    }
  }
  return H;
}

Mat exp_corr_matrix(int n, double rho) {
  Mat R(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      R(i, j) = std::pow(rho, std::abs(i - j));
    }
  }
  return R;
}

Mat gen_kronecker(RngStream& rng, const ChannelModel& model) {
  Mat K = gen_iid(rng, model.n_r, model.n_t);
  if (model.rho == 0.0) {
    return K;  // correlation matrices are the identity
  }
  Mat Rr = sym_sqrt(exp_corr_matrix(model.n_r, model.rho));
  Mat Rt = sym_sqrt(exp_corr_matrix(model.n_t, model.rho));
  return Rr * K * Rt;
}

MimoInstance sample_instance(const RngStream& rng, const ChannelModel& model,
                             const Alphabet& a, double snr_db) {
  validate(model);
  MimoInstance inst;
  inst.model = model;
  inst.seed = rng.seed();
  inst.stream = rng.stream();
  inst.snr_db = snr_db;
  inst.sigma2 = sigma2_from_snr(snr_db, model.n_t, model.n_r);

  RngStream rng_x = rng.child(0);
  RngStream rng_h = rng.child(1);
  RngStream rng_n = rng.child(2);

  const std::uint64_t k = static_cast<std::uint64_t>(a.size());
  inst.x_idx.resize(model.n_t);
  Vec x(model.n_t);
  for (int i = 0; i < model.n_t; ++i) {
    // Alphabet sizes are powers of two, so the modulo is exactly uniform.
    const int idx = static_cast<int>(rng_x.next_u64() % k);
    inst.x_idx[i] = idx;
    x[i] = a.levels[idx];
  }

  inst.H = (model.kind == ChannelKind::Kronecker)
               ? gen_kronecker(rng_h, model)
               : gen_iid(rng_h, model.n_r, model.n_t);

  Vec n = gaussian(rng_n, model.n_r, 0.0, std::sqrt(inst.sigma2));
  inst.y = inst.H * x + n;
  return inst;
}

}  // namespace mimo
