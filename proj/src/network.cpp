#include "stgf/stgnn/network.hpp"

#include <cmath>

#include "stgf/core/spd.hpp"
#include "stgf/stgnn/tape.hpp"

namespace stgf::stgnn {

namespace {

Tensor sigmoid_of(const Tensor& x) {
  return ((-x.array()).exp() + 1.0).inverse().matrix();
}

/// Stacks per-object means at step k into an (objects x 3) matrix.
Tensor positions_at(const std::vector<TrajectoryHistory>& histories, int k) {
  Tensor out(static_cast<Eigen::Index>(histories.size()), 3);
  for (std::size_t i = 0; i < histories.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = histories[i].points[k].second.mean.transpose();
  }
  return out;
}

void validate_histories(const std::vector<TrajectoryHistory>& histories) {
  if (histories.empty()) throw RaggedHistoriesError("no histories given");
  const int len = histories.front().length();
  if (len < 2) throw HistoryTooShortError("histories must contain at least 2 points");
  for (const auto& h : histories) {
    if (h.length() < 2) throw HistoryTooShortError("histories must contain at least 2 points");
    if (h.length() != len) throw RaggedHistoriesError("histories differ in length");
    for (int k = 0; k < len; ++k) {
      if (h.points[k].first != histories.front().points[k].first)
        throw RaggedHistoriesError("histories differ in time indices");
    }
  }
}

}  // namespace

LstmState lstm_step(const LstmState& prev, const Tensor& input, const LstmParams& p) {
  const Tensor gates = ((input * p.w_ih + prev.h * p.w_hh).rowwise() + p.b.row(0)).eval();
  const int h = kHiddenDim;
  const Tensor gi = sigmoid_of(gates.middleCols(0, h));
  const Tensor gf = sigmoid_of(gates.middleCols(h, h));
  const Tensor gg = gates.middleCols(2 * h, h).array().tanh().matrix();
  const Tensor go = sigmoid_of(gates.middleCols(3 * h, h));
  LstmState out;
  out.c = gf.cwiseProduct(prev.c) + gi.cwiseProduct(gg);
  out.h = go.cwiseProduct(out.c.array().tanh().matrix());
  return out;
}

LstmState lstm_encode_step(const LstmState& prev, const Vec3& delta_z, const LstmParams& p) {
  return lstm_step(prev, delta_z.transpose(), p);
}

std::vector<std::vector<int>> neighborhoods(int n_nodes,
                                            const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> nbrs(n_nodes);
  for (int i = 0; i < n_nodes; ++i) nbrs[i].push_back(i);
  for (const auto& [a, b] : edges) {
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  return nbrs;
}

Eigen::MatrixXd attention_scores(const Tensor& embeddings,
                                 const std::vector<std::vector<int>>& neighbors,
                                 const GatParams& layer) {
  const Tensor u = embeddings * layer.w;
  const int m = static_cast<int>(u.rows());
  const int d = static_cast<int>(u.cols());
  const Eigen::VectorXd su = u * layer.a.row(0).head(d).transpose();
  const Eigen::VectorXd dv = u * layer.a.row(0).tail(d).transpose();
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    double score_max = 0.0;
    for (int j : neighbors[i]) score_max = std::max(score_max, std::max(su(i) + dv(j), 0.0));
    double denom = 0.0;
    for (int j : neighbors[i]) {
      alpha(i, j) = std::exp(std::max(su(i) + dv(j), 0.0) - score_max);
      denom += alpha(i, j);
    }
    for (int j : neighbors[i]) alpha(i, j) /= denom;
  }
  return alpha;
}

Tensor gat_layer(const Tensor& embeddings, const std::vector<std::vector<int>>& neighbors,
                 const GatParams& layer) {
  const Tensor u = embeddings * layer.w;
  const Eigen::MatrixXd alpha = attention_scores(embeddings, neighbors, layer);
  return (alpha * u).cwiseMax(0.0);
}

std::vector<Vec3> forward(const std::vector<TrajectoryHistory>& histories,
                          const ModelParams& params) {
  validate_histories(histories);
  const int m = static_cast<int>(histories.size());
  const int len = histories.front().length();

  LstmState enc = LstmState::zero(m);
  Tensor last_delta;
  Tensor prev = positions_at(histories, 0);
  for (int k = 1; k < len; ++k) {
    Tensor cur = positions_at(histories, k);
    last_delta = cur - prev;
    enc = lstm_step(enc, last_delta, params.encoder);
    prev = std::move(cur);
  }

  const auto nbrs = neighborhoods(m, complete_edges(m));
  const Tensor s1 = gat_layer(enc.h, nbrs, params.gat1);
  const Tensor s2 = gat_layer(s1, nbrs, params.gat2);

  Tensor embed(m, kEmbedDim);
  embed << enc.h, s2;

  LstmState dec;
  dec.h = embed * params.decoder_init;
  dec.c = Tensor::Zero(m, kHiddenDim);
  dec = lstm_step(dec, last_delta, params.decoder);

  const Tensor delta_hat = (dec.h * params.out_w).rowwise() + params.out_b.row(0);
  const Tensor x = prev + delta_hat;

  std::vector<Vec3> out(m);
  for (int i = 0; i < m; ++i) out[i] = x.row(i).transpose();
  return out;
}

double loss(const std::vector<Vec3>& predictions, const std::vector<Vec3>& ground_truth) {
  if (predictions.size() != ground_truth.size())
    throw CountMismatchError("predictions and ground truth differ in count");
  if (predictions.empty()) throw CountMismatchError("loss over zero objects");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    sum += (predictions[i] - ground_truth[i]).squaredNorm();
  }
  return sum / static_cast<double>(predictions.size());
}

Mat3 propagate_uncertainty(const Mat3& p_prev, const ProcessNoise& q) {
  return p_prev + q.cov;
}

namespace {

struct TapeParams {
  Tape::Var enc_w_ih, enc_w_hh, enc_b;
  Tape::Var gat1_w, gat1_a, gat2_w, gat2_a;
  Tape::Var dec_init, dec_w_ih, dec_w_hh, dec_b;
  Tape::Var out_w, out_b;
};

TapeParams register_params(Tape& tape, const ModelParams& p) {
  TapeParams t;
  t.enc_w_ih = tape.param(p.encoder.w_ih);
  t.enc_w_hh = tape.param(p.encoder.w_hh);
  t.enc_b = tape.param(p.encoder.b);
  t.gat1_w = tape.param(p.gat1.w);
  t.gat1_a = tape.param(p.gat1.a);
  t.gat2_w = tape.param(p.gat2.w);
  t.gat2_a = tape.param(p.gat2.a);
  t.dec_init = tape.param(p.decoder_init);
  t.dec_w_ih = tape.param(p.decoder.w_ih);
  t.dec_w_hh = tape.param(p.decoder.w_hh);
  t.dec_b = tape.param(p.decoder.b);
  t.out_w = tape.param(p.out_w);
  t.out_b = tape.param(p.out_b);
  return t;
}

struct TapeLstmState {
  Tape::Var h, c;
};

TapeLstmState tape_lstm_step(Tape& tape, const TapeLstmState& prev, Tape::Var input,
                             Tape::Var w_ih, Tape::Var w_hh, Tape::Var b) {
  const int h = kHiddenDim;
  Tape::Var gates =
      tape.add_rowwise(tape.add(tape.matmul(input, w_ih), tape.matmul(prev.h, w_hh)), b);
  Tape::Var gi = tape.sigmoid(tape.slice_cols(gates, 0, h));
  Tape::Var gf = tape.sigmoid(tape.slice_cols(gates, h, h));
  Tape::Var gg = tape.tanh(tape.slice_cols(gates, 2 * h, h));
  Tape::Var go = tape.sigmoid(tape.slice_cols(gates, 3 * h, h));
  TapeLstmState out;
  out.c = tape.add(tape.cmul(gf, prev.c), tape.cmul(gi, gg));
  out.h = tape.cmul(go, tape.tanh(out.c));
  return out;
}

/// Builds the whole forward graph; returns the prediction node (m x 3).
Tape::Var tape_forward(Tape& tape, const TapeParams& tp,
                       const std::vector<TrajectoryHistory>& histories) {
  const int m = static_cast<int>(histories.size());
  const int len = histories.front().length();

  TapeLstmState enc{tape.value(Tensor::Zero(m, kHiddenDim)),
                    tape.value(Tensor::Zero(m, kHiddenDim))};
  Tape::Var last_delta{};
  Tensor prev = positions_at(histories, 0);
  for (int k = 1; k < len; ++k) {
    Tensor cur = positions_at(histories, k);
    last_delta = tape.value(cur - prev);
    enc = tape_lstm_step(tape, enc, last_delta, tp.enc_w_ih, tp.enc_w_hh, tp.enc_b);
    prev = std::move(cur);
  }

  const auto nbrs = neighborhoods(m, complete_edges(m));
  Tape::Var s1 = tape.gat_attention(tape.matmul(enc.h, tp.gat1_w), tp.gat1_a, nbrs);
  Tape::Var s2 = tape.gat_attention(tape.matmul(s1, tp.gat2_w), tp.gat2_a, nbrs);
  Tape::Var embed = tape.concat_cols(enc.h, s2);

  TapeLstmState dec{tape.matmul(embed, tp.dec_init), tape.value(Tensor::Zero(m, kHiddenDim))};
  dec = tape_lstm_step(tape, dec, last_delta, tp.dec_w_ih, tp.dec_w_hh, tp.dec_b);

  Tape::Var delta_hat = tape.add_rowwise(tape.matmul(dec.h, tp.out_w), tp.out_b);
  return tape.add(delta_hat, tape.value(prev));
}

void collect_grads(const Tape& tape, const TapeParams& tp, ModelParams& grads) {
  grads.encoder.w_ih += tape.grad(tp.enc_w_ih);
  grads.encoder.w_hh += tape.grad(tp.enc_w_hh);
  grads.encoder.b += tape.grad(tp.enc_b);
  grads.gat1.w += tape.grad(tp.gat1_w);
  grads.gat1.a += tape.grad(tp.gat1_a);
  grads.gat2.w += tape.grad(tp.gat2_w);
  grads.gat2.a += tape.grad(tp.gat2_a);
  grads.decoder_init += tape.grad(tp.dec_init);
  grads.decoder.w_ih += tape.grad(tp.dec_w_ih);
  grads.decoder.w_hh += tape.grad(tp.dec_w_hh);
  grads.decoder.b += tape.grad(tp.dec_b);
  grads.out_w += tape.grad(tp.out_w);
  grads.out_b += tape.grad(tp.out_b);
}

}  // namespace

double backward_into(const std::vector<TrajectoryHistory>& histories,
                     const std::vector<Vec3>& ground_truth, const ModelParams& params,
                     ModelParams& grad_accum) {
  validate_histories(histories);
  if (histories.size() != ground_truth.size())
    throw CountMismatchError("histories and ground truth differ in count");

  const int m = static_cast<int>(histories.size());
  Tape tape;
  const TapeParams tp = register_params(tape, params);
  const Tape::Var pred = tape_forward(tape, tp, histories);

  Tensor truth(m, 3);
  for (int i = 0; i < m; ++i) truth.row(i) = ground_truth[i].transpose();
  const Tensor diff = tape.val(pred) - truth;
  const double loss_value = diff.array().square().rowwise().sum().mean();

  tape.backward(pred, 2.0 * diff / static_cast<double>(m));
  collect_grads(tape, tp, grad_accum);
  return loss_value;
}

ModelParams backward(const std::vector<TrajectoryHistory>& histories,
                     const std::vector<Vec3>& ground_truth, const ModelParams& params) {
  ModelParams grads = ModelParams::zeros();
  backward_into(histories, ground_truth, params, grads);
  return grads;
}

}  // namespace stgf::stgnn
