#pragma once

#include <vector>

#include <Eigen/Core>

#include "stgf/stgnn/model.hpp"

namespace stgf::stgnn {

/// Reverse-mode gradient engine scoped to this architecture: a flat tape of
/// dense ops (matmul, elementwise activations, slicing/concat and a fused
/// graph-attention node). Nodes are topologically ordered by construction,
/// so backward is a single reverse sweep.
class Tape {
 public:
  struct Var {
    int id = -1;
  };

  /// Leaf that never accumulates a gradient (inputs, constants).
  Var value(Tensor v);
  /// Leaf whose gradient is wanted (trainable tensors).
  Var param(Tensor v);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  /// a (m x c) + bias (1 x c) broadcast over rows.
  Var add_rowwise(Var a, Var bias);
  Var cmul(Var a, Var b);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var slice_cols(Var a, int begin, int len);
  Var concat_cols(Var a, Var b);

  /// One graph-attention layer applied to already-transformed features
  /// u = m_embed * W: per-node softmax over ReLU'd pair scores against the
  /// attention vector, then ReLU of the alpha-weighted neighbor sum.
  Var gat_attention(Var u, Var attn, const std::vector<std::vector<int>>& neighbors);

  const Tensor& val(Var v) const { return nodes_[v.id].value; }

  /// Seeds d(root) and sweeps the tape once. May be called once per tape.
  void backward(Var root, const Tensor& seed);

  /// Gradient accumulated at v; zeros of the value's shape if none reached it.
  Tensor grad(Var v) const;

  void clear();

 private:
  enum class Op : std::uint8_t {
    kLeaf,
    kMatMul,
    kAdd,
    kAddRowwise,
    kCMul,
    kSigmoid,
    kTanh,
    kRelu,
    kSliceCols,
    kConcatCols,
    kGatAttention,
  };

  struct Node {
    Op op = Op::kLeaf;
    int a = -1;
    int b = -1;
    int i0 = 0;  // slice begin / aux index
    int i1 = 0;  // slice length
    bool needs_grad = false;
    bool has_grad = false;
    Tensor value;
    Tensor grad;
  };

  struct GatAux {
    Eigen::MatrixXd raw;    // pre-ReLU pair scores
    Eigen::MatrixXd alpha;  // normalized weights, zero off-neighborhood
    Tensor pre;             // pre-ReLU aggregated features
    std::vector<std::vector<int>> neighbors;
  };

  Var push(Op op, Tensor value, int a, int b, int i0 = 0, int i1 = 0);
  void accumulate(int id, const Tensor& g);

  std::vector<Node> nodes_;
  std::vector<GatAux> gat_aux_;
};

}  // namespace stgf::stgnn
