#include "mimo/gnn_tape.hpp"

namespace mimo {

GnnBatch assemble_batch(std::span<const MimoInstance> instances,
                        const GnnArch& arch, bool with_labels) {
  if (instances.empty()) {
    throw EmptyDataset("assemble_batch: no instances");
  }
  const int b_count = static_cast<int>(instances.size());
  const int n_t = static_cast<int>(instances[0].H.cols());
  const int n_edges = n_t * (n_t - 1);
  const int k = arch.alphabet_size;

  GnnBatch batch;
  batch.batch = b_count;
  batch.n_t = n_t;
  batch.node_init.resize(b_count * n_t, arch.node_feature_size());
  batch.edge_feat.resize(b_count * n_edges, arch.edge_feature_size());
  if (with_labels) {
    batch.labels = Mat::Zero(b_count * n_t, k);
  }
  batch.src_rows.reserve(b_count * n_edges);
  batch.dst_rows.reserve(b_count * n_edges);

  for (int b = 0; b < b_count; ++b) {
    const MimoInstance& inst = instances[b];
    if (inst.H.cols() != n_t) {
      throw ShapeMismatch("assemble_batch: mixed N_t in one batch");
    }
    const GraphFeatures feat = build_features(inst, arch.variant);
    batch.node_init.middleRows(b * n_t, n_t) = feat.node_init;
    int e = b * n_edges;
    for (int j = 0; j < n_t; ++j) {
      for (int i = 0; i < n_t; ++i) {
        if (i == j) {
          continue;
        }
        batch.edge_feat.row(e) = feat.edge_feat.row(i * n_t + j);
        batch.src_rows.push_back(b * n_t + i);
        batch.dst_rows.push_back(b * n_t + j);
        ++e;
      }
    }
    if (with_labels) {
      if (static_cast<int>(inst.x_idx.size()) != n_t) {
        throw ShapeMismatch("assemble_batch: instance lacks true indices");
      }
      for (int i = 0; i < n_t; ++i) {
        if (inst.x_idx[i] < 0 || inst.x_idx[i] >= k) {
          throw IndexOutOfRange("assemble_batch: symbol index out of range");
        }
        batch.labels(b * n_t + i, inst.x_idx[i]) = 1.0;
      }
    }
  }
  return batch;
}

TapedForward gnn_forward_taped(const GnnBatch& batch,
                               const GnnParameters& params,
                               const GnnArch& arch, RngStream* rng,
                               bool train_mode, double loss_scale) {
  validate(arch);
  validate(params, arch);
  if (train_mode && rng == nullptr) {
    throw Error("gnn_forward_taped: training mode requires an rng");
  }

  TapedForward fwd;
  Tape& t = fwd.tape;

  // Bind parameters as differentiable leaves, canonical order.
  std::vector<Tape::NodeId>& pn = fwd.param_nodes;
  params.for_each([&](const char*, const Mat& m) { pn.push_back(t.param(m)); });
  int idx = 0;
  auto next_param = [&]() { return pn[idx++]; };
  const Tape::NodeId enc_W = next_param(), enc_b = next_param();
  const Tape::NodeId m_W1 = next_param(), m_b1 = next_param();
  const Tape::NodeId m_W2 = next_param(), m_b2 = next_param();
  const Tape::NodeId m_W3 = next_param(), m_b3 = next_param();
  const Tape::NodeId gru_Wr = next_param(), gru_Ur = next_param(),
                     gru_br = next_param();
  const Tape::NodeId gru_Wz = next_param(), gru_Uz = next_param(),
                     gru_bz = next_param();
  const Tape::NodeId gru_Wn = next_param(), gru_Un = next_param(),
                     gru_bn = next_param();
  const Tape::NodeId proj_W = next_param(), proj_b = next_param();
  const Tape::NodeId r_W1 = next_param(), r_b1 = next_param();
  const Tape::NodeId r_W2 = next_param(), r_b2 = next_param();
  const Tape::NodeId r_W3 = next_param(), r_b3 = next_param();

  const Tape::NodeId features = t.constant(batch.node_init);
  Tape::NodeId u = t.affine(features, enc_W, enc_b);
  Tape::NodeId h =
      t.constant(Mat::Zero(batch.batch * batch.n_t, arch.hidden));

  for (int iter = 0; iter < arch.iterations; ++iter) {
    // Propagation MLP over every directed edge.
    Tape::NodeId ec =
        t.edge_concat(u, batch.edge_feat, batch.src_rows, batch.dst_rows);
    Tape::NodeId h1 = t.relu(t.affine(ec, m_W1, m_b1));
    if (train_mode && arch.dropout_m > 0.0) {
      h1 = t.dropout(h1, arch.dropout_m, *rng);
    }
    Tape::NodeId h2 = t.relu(t.affine(h1, m_W2, m_b2));
    Tape::NodeId msg = t.affine(h2, m_W3, m_b3);
    Tape::NodeId msum = t.segment_sum(msg, batch.n_t - 1);

    // GRU over [u, sum of incoming messages] with persistent hidden state.
    Tape::NodeId x = t.concat_cols(u, msum);
    Tape::NodeId r =
        t.sigmoid(t.add(t.affine(x, gru_Wr, gru_br), t.matmul_nt(h, gru_Ur)));
    Tape::NodeId z =
        t.sigmoid(t.add(t.affine(x, gru_Wz, gru_bz), t.matmul_nt(h, gru_Uz)));
    Tape::NodeId rh = t.hadamard(r, h);
    Tape::NodeId cand =
        t.tanh_op(t.add(t.affine(x, gru_Wn, gru_bn), t.matmul_nt(rh, gru_Un)));
    h = t.add(t.hadamard(t.one_minus(z), cand), t.hadamard(z, h));
    u = t.affine(h, proj_W, proj_b);
  }

  // Readout.
  Tape::NodeId rh1 = t.relu(t.affine(u, r_W1, r_b1));
  if (train_mode && arch.dropout_r > 0.0) {
    rh1 = t.dropout(rh1, arch.dropout_r, *rng);
  }
  Tape::NodeId rh2 = t.relu(t.affine(rh1, r_W2, r_b2));
  fwd.logits = t.affine(rh2, r_W3, r_b3);

  if (batch.has_labels()) {
    fwd.loss = t.softmax_xent(fwd.logits, batch.labels, loss_scale);
  }
  return fwd;
}

GnnParameters read_gradients(const TapedForward& fwd, const GnnArch& arch) {
  GnnParameters grads = zero_params(arch);
  std::size_t idx = 0;
  grads.for_each([&](const char*, Mat& g) {
    const Mat& got = fwd.tape.grad(fwd.param_nodes[idx++]);
    if (got.size() > 0) {
      g = got;
    }
  });
  return grads;
}

Mat batch_probs(const TapedForward& fwd) {
  const Mat& logits = fwd.tape.value(fwd.logits);
  Mat probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    probs.row(i) = softmax(logits.row(i).transpose()).transpose();
  }
  return probs;
}

}  // namespace mimo
