#include "mimo/autodiff.hpp"

#include <cmath>

namespace mimo {

Tape::NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Mat& Tape::grad_ref(NodeId id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) {
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

Tape::NodeId Tape::constant(Mat value) {
  Node n;
  n.op = Op::Constant;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::NodeId Tape::param(Mat value) {
  Node n;
  n.op = Op::Param;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::NodeId Tape::matmul_nt(NodeId x, NodeId w) {
  Node n;
  n.op = Op::MatmulNT;
  n.a = x;
  n.b = w;
  n.value.noalias() = nodes_[x].value * nodes_[w].value.transpose();
  return push(std::move(n));
}

Tape::NodeId Tape::affine(NodeId x, NodeId w, NodeId b) {
  Node n;
  n.op = Op::Affine;
  n.a = x;
  n.b = w;
  n.c = b;
  n.value.noalias() = nodes_[x].value * nodes_[w].value.transpose();
  n.value.rowwise() += nodes_[b].value.col(0).transpose();
  return push(std::move(n));
}

Tape::NodeId Tape::relu(NodeId x) {
  Node n;
  n.op = Op::Relu;
  n.a = x;
  n.value = nodes_[x].value.cwiseMax(0.0);
  return push(std::move(n));
}

Tape::NodeId Tape::sigmoid(NodeId x) {
  Node n;
  n.op = Op::Sigmoid;
  n.a = x;
  n.value = nodes_[x].value.unaryExpr(
      [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  return push(std::move(n));
}

Tape::NodeId Tape::tanh_op(NodeId x) {
  Node n;
  n.op = Op::Tanh;
  n.a = x;
  n.value = nodes_[x].value.array().tanh();
  return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  n.value = nodes_[a].value + nodes_[b].value;
  return push(std::move(n));
}

Tape::NodeId Tape::hadamard(NodeId a, NodeId b) {
  Node n;
  n.op = Op::Hadamard;
  n.a = a;
  n.b = b;
  n.value = nodes_[a].value.cwiseProduct(nodes_[b].value);
  return push(std::move(n));
}

Tape::NodeId Tape::one_minus(NodeId x) {
  Node n;
  n.op = Op::OneMinus;
  n.a = x;
  n.value = (1.0 - nodes_[x].value.array()).matrix();
  return push(std::move(n));
}

Tape::NodeId Tape::concat_cols(NodeId a, NodeId b) {
  const Mat& va = nodes_[a].value;
  const Mat& vb = nodes_[b].value;
  if (va.rows() != vb.rows()) {
    throw ShapeMismatch("concat_cols: row counts differ");
  }
  Node n;
  n.op = Op::ConcatCols;
  n.a = a;
  n.b = b;
  n.value.resize(va.rows(), va.cols() + vb.cols());
  n.value << va, vb;
  return push(std::move(n));
}

Tape::NodeId Tape::edge_concat(NodeId u, Mat edge_feat, std::vector<int> src,
                               std::vector<int> dst) {
  const Mat& vu = nodes_[u].value;
  const int su = static_cast<int>(vu.cols());
  const int n_edges = static_cast<int>(src.size());
  if (edge_feat.rows() != n_edges || dst.size() != src.size()) {
    throw ShapeMismatch("edge_concat: edge list sizes disagree");
  }
  Node n;
  n.op = Op::EdgeConcat;
  n.a = u;
  n.value.resize(n_edges, 2 * su + edge_feat.cols());
  for (int e = 0; e < n_edges; ++e) {
    n.value.row(e).segment(0, su) = vu.row(src[e]);
    n.value.row(e).segment(su, su) = vu.row(dst[e]);
  }
  n.value.rightCols(edge_feat.cols()) = edge_feat;
  n.src = std::move(src);
  n.dst = std::move(dst);
  return push(std::move(n));
}

Tape::NodeId Tape::segment_sum(NodeId x, int group_size) {
  const Mat& vx = nodes_[x].value;
  if (group_size < 1 || vx.rows() % group_size != 0) {
    throw ShapeMismatch("segment_sum: rows not divisible by group size");
  }
  const int n_groups = static_cast<int>(vx.rows()) / group_size;
  Node n;
  n.op = Op::SegmentSum;
  n.a = x;
  n.group = group_size;
  n.value.resize(n_groups, vx.cols());
  for (int g = 0; g < n_groups; ++g) {
    n.value.row(g) = vx.middleRows(g * group_size, group_size).colwise().sum();
  }
  return push(std::move(n));
}

Tape::NodeId Tape::dropout(NodeId x, double rate, RngStream& rng) {
  const Mat& vx = nodes_[x].value;
  Node n;
  n.op = Op::Dropout;
  n.a = x;
  n.aux.resize(vx.rows(), vx.cols());
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < vx.rows(); ++i) {
    for (Eigen::Index j = 0; j < vx.cols(); ++j) {
      n.aux(i, j) = rng.next_double() < rate ? 0.0 : keep_scale;
    }
  }
  n.value = vx.cwiseProduct(n.aux);
  return push(std::move(n));
}

Tape::NodeId Tape::softmax_xent(NodeId logits, Mat labels, double scale) {
  const Mat& z = nodes_[logits].value;
  if (z.rows() != labels.rows() || z.cols() != labels.cols()) {
    throw ShapeMismatch("softmax_xent: logits/labels shapes differ");
  }
  Node n;
  n.op = Op::SoftmaxXent;
  n.a = logits;
  n.scale = scale;
  n.aux.resize(z.rows(), z.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const Eigen::RowVectorXd shifted = z.row(i).array() - m;
    const double lse = std::log(shifted.array().exp().sum());
    n.aux.row(i) = (shifted.array() - lse).exp();
    loss -= labels.row(i).dot((shifted.array() - lse).matrix());
  }
  n.aux2 = std::move(labels);
  n.value = Mat::Constant(1, 1, scale * loss);
  return push(std::move(n));
}

void Tape::backward(NodeId root) {
  if (nodes_[root].value.size() != 1) {
    throw Error("backward: root must be a scalar node");
  }
  grad_ref(root)(0, 0) = 1.0;

  for (NodeId id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) {
      continue;  // not on any path to the root
    }
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::Constant:
      case Op::Param:
        break;
      case Op::MatmulNT:
        grad_ref(n.a).noalias() += g * nodes_[n.b].value;
        grad_ref(n.b).noalias() += g.transpose() * nodes_[n.a].value;
        break;
      case Op::Affine:
        grad_ref(n.a).noalias() += g * nodes_[n.b].value;
        grad_ref(n.b).noalias() += g.transpose() * nodes_[n.a].value;
        grad_ref(n.c).col(0) += g.colwise().sum().transpose();
        break;
      case Op::Relu:
        grad_ref(n.a).array() +=
            g.array() * (n.value.array() > 0.0).cast<double>();
        break;
      case Op::Sigmoid:
        grad_ref(n.a).array() +=
            g.array() * n.value.array() * (1.0 - n.value.array());
        break;
      case Op::Tanh:
        grad_ref(n.a).array() +=
            g.array() * (1.0 - n.value.array() * n.value.array());
        break;
      case Op::Add:
        grad_ref(n.a) += g;
        grad_ref(n.b) += g;
        break;
      case Op::Hadamard:
        grad_ref(n.a).array() += g.array() * nodes_[n.b].value.array();
        grad_ref(n.b).array() += g.array() * nodes_[n.a].value.array();
        break;
      case Op::OneMinus:
        grad_ref(n.a) -= g;
        break;
      case Op::ConcatCols:
        grad_ref(n.a) += g.leftCols(nodes_[n.a].value.cols());
        grad_ref(n.b) += g.rightCols(nodes_[n.b].value.cols());
        break;
      case Op::EdgeConcat: {
        Mat& gu = grad_ref(n.a);
        const int su = static_cast<int>(gu.cols());
        for (std::size_t e = 0; e < n.src.size(); ++e) {
          gu.row(n.src[e]) += g.row(static_cast<int>(e)).segment(0, su);
          gu.row(n.dst[e]) += g.row(static_cast<int>(e)).segment(su, su);
        }
        break;
      }
      case Op::SegmentSum: {
        Mat& gx = grad_ref(n.a);
        for (int grp = 0; grp < n.value.rows(); ++grp) {
          gx.middleRows(grp * n.group, n.group).rowwise() += g.row(grp);
        }
        break;
      }
      case Op::Dropout:
        grad_ref(n.a).array() += g.array() * n.aux.array();
        break;
      case Op::SoftmaxXent:
        grad_ref(n.a) += (g(0, 0) * n.scale) * (n.aux - n.aux2);
        break;
    }
  }
}

}  // namespace mimo
