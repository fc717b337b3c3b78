#pragma once

#include <span>

#include "mimo/autodiff.hpp"
#include "mimo/gnn.hpp"

namespace mimo {

//! A batch of detection problems sharing (N_t, alphabet), flattened for the
//! taped forward pass. Node row b * n_t + i; edge rows ordered by
//! (instance, destination, source) so incoming messages form consecutive
//! groups of n_t - 1 rows.
struct GnnBatch {
  int batch = 0;
  int n_t = 0;
  Mat node_init;  // (batch * n_t) x node_feature_size
  Mat edge_feat;  // (batch * n_t * (n_t - 1)) x edge_feature_size
  Mat labels;     // (batch * n_t) x |A|, empty when unlabeled
  std::vector<int> src_rows, dst_rows;

  bool has_labels() const { return labels.size() > 0; }
};

GnnBatch assemble_batch(std::span<const MimoInstance> instances,
                        const GnnArch& arch, bool with_labels);

//! Tape plus handles into it. `loss` is -1 for unlabeled batches.
struct TapedForward {
  Tape tape;
  Tape::NodeId logits = -1;
  Tape::NodeId loss = -1;
  std::vector<Tape::NodeId> param_nodes;  // canonical parameter order
};

//! Records the full forward pass of the batch on a fresh tape. In training
//! mode dropout masks are sampled from `rng` and recorded. `loss_scale`
//! multiplies the summed per-row cross-entropy (pass 1/total_batch when the
//! batch is processed in chunks).
TapedForward gnn_forward_taped(const GnnBatch& batch,
                               const GnnParameters& params,
                               const GnnArch& arch, RngStream* rng,
                               bool train_mode, double loss_scale);

//! Gradients for every parameter after tape.backward(loss), in a
//! GnnParameters-shaped container; tensors never reached by the loss are zero.
GnnParameters read_gradients(const TapedForward& fwd, const GnnArch& arch);

//! Row-softmax of the logits (evaluation output).
Mat batch_probs(const TapedForward& fwd);

}  // namespace mimo
