#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "stgf/core/errors.hpp"

namespace stgf::stgnn {

/// Dense parameter / activation carrier. Vectors are 1 x n row vectors;
/// batched activations are (objects x features).
using Tensor = Eigen::MatrixXd;

inline constexpr int kInputDim = 3;
inline constexpr int kHiddenDim = 32;
inline constexpr int kGat1Dim = 16;
inline constexpr int kEmbedDim = 2 * kHiddenDim;
inline constexpr int kGateDim = 4 * kHiddenDim;  // i, f, g, o stacked

/// One-layer LSTM cell parameters, gates stacked in i|f|g|o column order.
struct LstmParams {
  Tensor w_ih;  // input_dim x 4H
  Tensor w_hh;  // H x 4H
  Tensor b;     // 1 x 4H
};

struct GatParams {
  Tensor w;  // d_in x d_out
  Tensor a;  // 1 x 2*d_out, attention vector [source half | neighbor half]
};

/// Every trainable tensor of the spatiotemporal graph network. Also reused
/// as the gradient container, which keeps update loops trivial.
struct ModelParams {
  LstmParams encoder;  // 3 -> 32
  GatParams gat1;      // 32 -> 16
  GatParams gat2;      // 16 -> 32
  Tensor decoder_init; // 64 x 32
  LstmParams decoder;  // 3 -> 32
  Tensor out_w;        // 32 x 3
  Tensor out_b;        // 1 x 3

  static ModelParams zeros();
  /// Uniform(-0.1, 0.1) entries drawn from the portable seeded stream, filled
  /// row-major in canonical tensor order.
  static ModelParams seeded(std::uint64_t seed);
};

/// Visits (name, tensor) pairs in the canonical order: enc.w_ih, enc.w_hh,
/// enc.b, gat1.w, gat1.a, gat2.w, gat2.a, dec.init, dec.w_ih, dec.w_hh,
/// dec.b, out.w, out.b.
template <typename Params, typename Fn>
void for_each_tensor(Params& p, Fn&& fn) {
  fn("enc.w_ih", p.encoder.w_ih);
  fn("enc.w_hh", p.encoder.w_hh);
  fn("enc.b", p.encoder.b);
  fn("gat1.w", p.gat1.w);
  fn("gat1.a", p.gat1.a);
  fn("gat2.w", p.gat2.w);
  fn("gat2.a", p.gat2.a);
  fn("dec.init", p.decoder_init);
  fn("dec.w_ih", p.decoder.w_ih);
  fn("dec.w_hh", p.decoder.w_hh);
  fn("dec.b", p.decoder.b);
  fn("out.w", p.out_w);
  fn("out.b", p.out_b);
}

bool same_values(const ModelParams& a, const ModelParams& b);

/// JSON weights file, format_version 1: sorted keys, shortest round-trip
/// floats, tensors as {"shape": [...], "data": [... row-major ...]}.
void save_model(const ModelParams& params, std::uint64_t seed, const std::string& path);

struct LoadedModel {
  ModelParams params;
  std::uint64_t seed = 0;
};

LoadedModel load_model(const std::string& path);

}  // namespace stgf::stgnn
