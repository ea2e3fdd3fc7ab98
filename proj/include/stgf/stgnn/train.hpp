#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stgf/sim/scenario.hpp"
#include "stgf/stgnn/network.hpp"

namespace stgf::stgnn {

struct EmptyDatasetError : std::runtime_error {
  explicit EmptyDatasetError(const std::string& what) : std::runtime_error(what) {}
};

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  int batch_size = 8;
  double clip_norm = 5.0;  // global gradient-norm clip
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean sample loss per epoch
};

/// Raw-measurement histories of one view over frames [0, n_frames). Objects
/// missing from any of those frames are left out.
std::vector<TrajectoryHistory> measurement_histories(const sim::DataInstance& inst, int view,
                                                     int n_frames);

/// Teacher-forced gradient descent on next-step prediction. Each epoch visits
/// every (instance, view) once and draws one random prefix target per visit,
/// so the network sees every history length. Deterministic given the seed.
TrainResult train(const std::vector<sim::DataInstance>& dataset, const TrainConfig& cfg);

}  // namespace stgf::stgnn
