#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stgf/core/types.hpp"
#include "stgf/stgnn/model.hpp"

namespace stgf::stgnn {

struct HistoryTooShortError : std::runtime_error {
  explicit HistoryTooShortError(const std::string& what) : std::runtime_error(what) {}
};

struct RaggedHistoriesError : std::runtime_error {
  explicit RaggedHistoriesError(const std::string& what) : std::runtime_error(what) {}
};

struct CountMismatchError : std::runtime_error {
  explicit CountMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Constant per-run model-bias covariance added to P every step.
struct ProcessNoise {
  Mat3 cov = Mat3::Zero();
  static ProcessNoise isotropic(double q) { return ProcessNoise{q * Mat3::Identity()}; }
};

/// Batched LSTM carry: h and c are (objects x hidden).
struct LstmState {
  Tensor h;
  Tensor c;
  static LstmState zero(int rows, int hidden = kHiddenDim) {
    return {Tensor::Zero(rows, hidden), Tensor::Zero(rows, hidden)};
  }
};

/// One LSTM cell step over a batch of rows.
LstmState lstm_step(const LstmState& prev, const Tensor& input, const LstmParams& p);

/// Single-object encoder step (input is a motion delta).
LstmState lstm_encode_step(const LstmState& prev, const Vec3& delta_z, const LstmParams& p);

/// Neighbor lists from undirected index edges, with self-loops added so every
/// node has a non-empty neighborhood.
std::vector<std::vector<int>> neighborhoods(int n_nodes,
                                            const std::vector<std::pair<int, int>>& edges);

/// Normalized attention weights; row i holds alpha_{i,j} over j, zero outside
/// the neighborhood. Each row sums to 1.
Eigen::MatrixXd attention_scores(const Tensor& embeddings,
                                 const std::vector<std::vector<int>>& neighbors,
                                 const GatParams& layer);

/// s_i = ReLU(sum_j alpha_{ij} W m_j).
Tensor gat_layer(const Tensor& embeddings, const std::vector<std::vector<int>>& neighbors,
                 const GatParams& layer);

/// Learned next-step positions for all objects of one view: LSTM over motion
/// deltas, two attention layers over the complete graph, spatiotemporal
/// concat, one decoder step, then x = z_last + predicted delta.
std::vector<Vec3> forward(const std::vector<TrajectoryHistory>& histories,
                          const ModelParams& params);

double loss(const std::vector<Vec3>& predictions, const std::vector<Vec3>& ground_truth);

/// P grows additively with the process noise between measurements.
Mat3 propagate_uncertainty(const Mat3& p_prev, const ProcessNoise& q);

/// Exact reverse-mode gradients of loss() w.r.t. every parameter tensor.
ModelParams backward(const std::vector<TrajectoryHistory>& histories,
                     const std::vector<Vec3>& ground_truth, const ModelParams& params);

/// Forward + loss + gradients in one tape pass (training fast path).
double backward_into(const std::vector<TrajectoryHistory>& histories,
                     const std::vector<Vec3>& ground_truth, const ModelParams& params,
                     ModelParams& grad_accum);

}  // namespace stgf::stgnn
