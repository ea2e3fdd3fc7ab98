#include "stgf/stgnn/tape.hpp"

#include <cassert>
#include <cmath>

namespace stgf::stgnn {

Tape::Var Tape::push(Op op, Tensor value, int a, int b, int i0, int i1) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.i0 = i0;
  n.i1 = i1;
  n.needs_grad = (a >= 0 && nodes_[a].needs_grad) || (b >= 0 && nodes_[b].needs_grad);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::value(Tensor v) { return push(Op::kLeaf, std::move(v), -1, -1); }

Tape::Var Tape::param(Tensor v) {
  Var var = push(Op::kLeaf, std::move(v), -1, -1);
  nodes_[var.id].needs_grad = true;
  return var;
}

Tape::Var Tape::matmul(Var a, Var b) {
  assert(nodes_[a.id].value.cols() == nodes_[b.id].value.rows());
  return push(Op::kMatMul, nodes_[a.id].value * nodes_[b.id].value, a.id, b.id);
}

Tape::Var Tape::add(Var a, Var b) {
  return push(Op::kAdd, nodes_[a.id].value + nodes_[b.id].value, a.id, b.id);
}

Tape::Var Tape::add_rowwise(Var a, Var bias) {
  const Tensor& m = nodes_[a.id].value;
  const Tensor& v = nodes_[bias.id].value;
  assert(v.rows() == 1 && v.cols() == m.cols());
  return push(Op::kAddRowwise, m.rowwise() + v.row(0), a.id, bias.id);
}

Tape::Var Tape::cmul(Var a, Var b) {
  return push(Op::kCMul, nodes_[a.id].value.cwiseProduct(nodes_[b.id].value), a.id, b.id);
}

Tape::Var Tape::sigmoid(Var a) {
  Tensor y = ((-nodes_[a.id].value.array()).exp() + 1.0).inverse().matrix();
  return push(Op::kSigmoid, std::move(y), a.id, -1);
}

Tape::Var Tape::tanh(Var a) {
  return push(Op::kTanh, nodes_[a.id].value.array().tanh().matrix(), a.id, -1);
}

Tape::Var Tape::relu(Var a) {
  return push(Op::kRelu, nodes_[a.id].value.cwiseMax(0.0), a.id, -1);
}

Tape::Var Tape::slice_cols(Var a, int begin, int len) {
  return push(Op::kSliceCols, nodes_[a.id].value.middleCols(begin, len), a.id, -1, begin, len);
}

Tape::Var Tape::concat_cols(Var a, Var b) {
  const Tensor& l = nodes_[a.id].value;
  const Tensor& r = nodes_[b.id].value;
  assert(l.rows() == r.rows());
  Tensor out(l.rows(), l.cols() + r.cols());
  out << l, r;
  return push(Op::kConcatCols, std::move(out), a.id, b.id, static_cast<int>(l.cols()), 0);
}

Tape::Var Tape::gat_attention(Var u, Var attn, const std::vector<std::vector<int>>& neighbors) {
  const Tensor& uv = nodes_[u.id].value;
  const Tensor& av = nodes_[attn.id].value;
  const int m = static_cast<int>(uv.rows());
  const int d = static_cast<int>(uv.cols());
  assert(av.rows() == 1 && av.cols() == 2 * d);
  assert(static_cast<int>(neighbors.size()) == m);

  GatAux aux;
  aux.neighbors = neighbors;
  const Eigen::VectorXd su = uv * av.row(0).head(d).transpose();
  const Eigen::VectorXd dv = uv * av.row(0).tail(d).transpose();
  aux.raw = Eigen::MatrixXd::Zero(m, m);
  aux.alpha = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    double score_max = 0.0;  // ReLU'd scores are >= 0, so 0 is a valid floor
    for (int j : neighbors[i]) {
      aux.raw(i, j) = su(i) + dv(j);
      score_max = std::max(score_max, std::max(aux.raw(i, j), 0.0));
    }
    double denom = 0.0;
    for (int j : neighbors[i]) {
      const double score = std::max(aux.raw(i, j), 0.0);
      aux.alpha(i, j) = std::exp(score - score_max);
      denom += aux.alpha(i, j);
    }
    for (int j : neighbors[i]) aux.alpha(i, j) /= denom;
  }
  aux.pre = aux.alpha * uv;
  Tensor out = aux.pre.cwiseMax(0.0);

  gat_aux_.push_back(std::move(aux));
  return push(Op::kGatAttention, std::move(out), u.id, attn.id,
              static_cast<int>(gat_aux_.size()) - 1, 0);
}

void Tape::accumulate(int id, const Tensor& g) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var root, const Tensor& seed) {
  assert(seed.rows() == nodes_[root.id].value.rows() &&
         seed.cols() == nodes_[root.id].value.cols());
  accumulate(root.id, seed);
  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.has_grad || !n.needs_grad) continue;
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatMul:
        accumulate(n.a, g * nodes_[n.b].value.transpose());
        accumulate(n.b, nodes_[n.a].value.transpose() * g);
        break;
      case Op::kAdd:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::kAddRowwise:
        accumulate(n.a, g);
        accumulate(n.b, g.colwise().sum());
        break;
      case Op::kCMul:
        accumulate(n.a, g.cwiseProduct(nodes_[n.b].value));
        accumulate(n.b, g.cwiseProduct(nodes_[n.a].value));
        break;
      case Op::kSigmoid: {
        const Tensor& y = n.value;
        accumulate(n.a, g.cwiseProduct(y.cwiseProduct(Tensor::Ones(y.rows(), y.cols()) - y)));
        break;
      }
      case Op::kTanh: {
        const Tensor& y = n.value;
        accumulate(n.a, (g.array() * (1.0 - y.array().square())).matrix());
        break;
      }
      case Op::kRelu:
        accumulate(n.a, (g.array() * (n.value.array() > 0.0).cast<double>()).matrix());
        break;
      case Op::kSliceCols: {
        Tensor full = Tensor::Zero(nodes_[n.a].value.rows(), nodes_[n.a].value.cols());
        full.middleCols(n.i0, n.i1) = g;
        accumulate(n.a, full);
        break;
      }
      case Op::kConcatCols:
        accumulate(n.a, g.leftCols(n.i0));
        accumulate(n.b, g.rightCols(g.cols() - n.i0));
        break;
      case Op::kGatAttention: {
        const GatAux& aux = gat_aux_[n.i0];
        const Tensor& u = nodes_[n.a].value;
        const Tensor& attn = nodes_[n.b].value;
        const int m = static_cast<int>(u.rows());
        const int d = static_cast<int>(u.cols());

        const Tensor gp = (g.array() * (aux.pre.array() > 0.0).cast<double>()).matrix();
        Tensor du = aux.alpha.transpose() * gp;

        const Eigen::MatrixXd dalpha = gp * u.transpose();
        Eigen::MatrixXd draw = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          double dot = 0.0;
          for (int j : aux.neighbors[i]) dot += aux.alpha(i, j) * dalpha(i, j);
          for (int j : aux.neighbors[i]) {
            const double dscore = aux.alpha(i, j) * (dalpha(i, j) - dot);
            draw(i, j) = aux.raw(i, j) > 0.0 ? dscore : 0.0;
          }
        }
        const Eigen::VectorXd dsu = draw.rowwise().sum();
        const Eigen::VectorXd ddv = draw.colwise().sum().transpose();
        du += dsu * attn.row(0).head(d) + ddv * attn.row(0).tail(d);

        Tensor dattn(1, 2 * d);
        dattn.row(0).head(d) = dsu.transpose() * u;
        dattn.row(0).tail(d) = ddv.transpose() * u;

        accumulate(n.a, du);
        accumulate(n.b, dattn);
        break;
      }
    }
  }
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.has_grad) return n.grad;
  return Tensor::Zero(n.value.rows(), n.value.cols());
}

void Tape::clear() {
  nodes_.clear();
  gat_aux_.clear();
}

}  // namespace stgf::stgnn
