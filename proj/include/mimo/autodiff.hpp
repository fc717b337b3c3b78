#pragma once

#include <vector>

#include "mimo/numerics.hpp"

namespace mimo {

//! Reverse-mode tape over matrix-valued nodes. Operations append nodes in
//! topological order; backward() replays the record in reverse and
//! accumulates exact gradients into every `param` leaf touched by the root.
class Tape {
 public:
  using NodeId = int;

  //! Non-differentiable leaf.
  NodeId constant(Mat value);
  //! Differentiable leaf; gradient available after backward().
  NodeId param(Mat value);

  //! X * W^T.
  NodeId matmul_nt(NodeId x, NodeId w);
  //! X * W^T + 1 b^T (b is a column vector node).
  NodeId affine(NodeId x, NodeId w, NodeId b);
  NodeId relu(NodeId x);
  NodeId sigmoid(NodeId x);
  NodeId tanh_op(NodeId x);
  NodeId add(NodeId a, NodeId b);
  NodeId hadamard(NodeId a, NodeId b);
  //! 1 - X elementwise.
  NodeId one_minus(NodeId x);
  NodeId concat_cols(NodeId a, NodeId b);

  //! Per-edge input [u(src), u(dst), edge_feat] built in one gather; the
  //! backward pass scatter-adds into the node-state gradient.
  NodeId edge_concat(NodeId u, Mat edge_feat, std::vector<int> src,
                     std::vector<int> dst);

  //! Sums consecutive row groups of fixed size.
  NodeId segment_sum(NodeId x, int group_size);

  //! Inverted dropout; the mask is recorded so backward is exact for the
  //! sampled subnetwork.
  NodeId dropout(NodeId x, double rate, RngStream& rng);

  //! scale * sum over rows of cross-entropy(softmax(logits), labels),
  //! as a 1x1 node. The softmax probabilities are retained for the
  //! p-hat minus p backward rule and for read_probs().
  NodeId softmax_xent(NodeId logits, Mat labels, double scale);

  const Mat& value(NodeId id) const { return nodes_[id].value; }
  const Mat& grad(NodeId id) const { return nodes_[id].grad; }

  //! Softmax probabilities stored by a softmax_xent node.
  const Mat& read_probs(NodeId xent_id) const { return nodes_[xent_id].aux; }

  //! Reverse sweep from a scalar (1x1) root.
  void backward(NodeId root);

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    Constant,
    Param,
    MatmulNT,
    Affine,
    Relu,
    Sigmoid,
    Tanh,
    Add,
    Hadamard,
    OneMinus,
    ConcatCols,
    EdgeConcat,
    SegmentSum,
    Dropout,
    SoftmaxXent,
  };

  struct Node {
    Op op;
    NodeId a = -1;
    NodeId b = -1;
    NodeId c = -1;
    Mat value;
    Mat grad;
    Mat aux;  // dropout mask / softmax probabilities / labels by op
    Mat aux2;
    std::vector<int> src, dst;
    int group = 0;
    double scale = 1.0;
  };

  NodeId push(Node n);
  Mat& grad_ref(NodeId id);

  std::vector<Node> nodes_;
};

}  // namespace mimo
