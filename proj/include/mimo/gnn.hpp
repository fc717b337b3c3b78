#pragma once

#include <optional>
#include <string>

#include "mimo/detectors.hpp"

namespace mimo {

enum class GnnVariant { Plain, MmsePrior };

std::string variant_name(GnnVariant v);  // "plain" / "mmse"
GnnVariant variant_from_name(const std::string& name);

//! Architecture of the learned message-passing detector.
struct GnnArch {
  GnnVariant variant = GnnVariant::Plain;
  int hidden = 128;       // width l of the MLP hidden layers and GRU state
  int state = 8;          // node-state size S_u
  int message = 8;        // message size S_m
  int iterations = 10;    // rounds T of message passing
  int alphabet_size = 4;  // sqrt(M)
  double dropout_m = 0.1;
  double dropout_r = 0.2;

  int edge_feature_size() const {
    return variant == GnnVariant::MmsePrior ? 3 : 2;
  }
  int node_feature_size() const {
    return variant == GnnVariant::MmsePrior ? 5 : 3;
  }
  int hidden_half() const { return hidden / 2; }
  int gru_input_size() const { return state + message; }
  std::string detector_label() const {
    return variant == GnnVariant::MmsePrior ? "gnn-mmse" : "gnn";
  }
};

void validate(const GnnArch& arch);
bool operator==(const GnnArch& a, const GnnArch& b);

//! All learnable tensors. Biases are column vectors. The visitation order of
//! for_each is the canonical order used by initialization, the optimizer and
//! the weights container.
struct GnnParameters {
  Mat enc_W, enc_b;                    // input encoder
  Mat m_W1, m_b1, m_W2, m_b2, m_W3, m_b3;  // propagation MLP
  Mat gru_Wr, gru_Ur, gru_br;          // reset gate
  Mat gru_Wz, gru_Uz, gru_bz;          // update gate
  Mat gru_Wn, gru_Un, gru_bn;          // candidate state
  Mat proj_W, proj_b;                  // GRU output projection to S_u
  Mat r_W1, r_b1, r_W2, r_b2, r_W3, r_b3;  // readout MLP

  template <class F>
  void for_each(F&& f) {
    f("enc.W", enc_W);
    f("enc.b", enc_b);
    f("m.W1", m_W1);
    f("m.b1", m_b1);
    f("m.W2", m_W2);
    f("m.b2", m_b2);
    f("m.W3", m_W3);
    f("m.b3", m_b3);
    f("gru.Wr", gru_Wr);
    f("gru.Ur", gru_Ur);
    f("gru.br", gru_br);
    f("gru.Wz", gru_Wz);
    f("gru.Uz", gru_Uz);
    f("gru.bz", gru_bz);
    f("gru.Wn", gru_Wn);
    f("gru.Un", gru_Un);
    f("gru.bn", gru_bn);
    f("proj.W", proj_W);
    f("proj.b", proj_b);
    f("r.W1", r_W1);
    f("r.b1", r_b1);
    f("r.W2", r_W2);
    f("r.b2", r_b2);
    f("r.W3", r_W3);
    f("r.b3", r_b3);
  }

  template <class F>
  void for_each(F&& f) const {
    const_cast<GnnParameters*>(this)->for_each(
        [&](const char* name, Mat& m) { f(name, const_cast<const Mat&>(m)); });
  }
};

//! Zero-valued parameter set with the shapes required by `arch`.
GnnParameters zero_params(const GnnArch& arch);

//! Throws ShapeMismatch unless every tensor matches the architecture.
void validate(const GnnParameters& params, const GnnArch& arch);

//! Per-edge and per-node input features of the detection graph.
struct GraphFeatures {
  Mat edge_feat;  // (n_t * n_t) x edge_feature_size, row i * n_t + j
  Mat node_init;  // n_t x node_feature_size
  std::optional<MmseOutput> mmse;

  int n_nodes() const { return static_cast<int>(node_init.rows()); }
};

GraphFeatures build_features(const MimoInstance& inst, GnnVariant variant);

//! u_i^0 = W f_i + b.
Mat encode_nodes(const GraphFeatures& feat, const GnnParameters& params);

//! One message per directed edge: row i * n_t + j holds m_{i->j}; diagonal
//! rows are zero. Dropout is active only in training mode.
Mat propagate(const Eigen::Ref<const Mat>& u, const GraphFeatures& feat,
              const GnnParameters& params, const GnnArch& arch, RngStream* rng,
              bool train_mode);

//! Sums incoming messages per node and advances the recurrent state.
//! Returns (next node states, next hidden states).
std::pair<Mat, Mat> aggregate(const Eigen::Ref<const Mat>& u_prev,
                              const Eigen::Ref<const Mat>& hidden_prev,
                              const Eigen::Ref<const Mat>& messages,
                              const GnnParameters& params);

//! Readout MLP followed by a row softmax.
Mat readout(const Eigen::Ref<const Mat>& u_final, const GnnParameters& params,
            const GnnArch& arch, RngStream* rng, bool train_mode);

//! Full pipeline on one instance. Evaluation mode (train_mode = false) is
//! deterministic and needs no rng.
DetectionResult gnn_forward(const MimoInstance& inst,
                            const GnnParameters& params, const GnnArch& arch,
                            const Alphabet& a, RngStream* rng = nullptr,
                            bool train_mode = false);

}  // namespace mimo
