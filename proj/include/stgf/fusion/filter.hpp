#pragma once

#include <functional>
#include <vector>

#include "stgf/fusion/fusion.hpp"
#include "stgf/stgnn/network.hpp"

namespace stgf::fusion {

struct ObjectSetMismatchError : std::runtime_error {
  explicit ObjectSetMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// What gets appended to each view's history after a fused step. kFused is
/// the default (the fused belief feeds the next prediction); kLearned follows
/// the pre-fusion assignment literally; kRaw passes the view's own
/// measurement through when it exists.
enum class Writeback { kFused, kLearned, kRaw };

Writeback writeback_from_string(const std::string& s);
std::string to_string(Writeback wb);

/// Maps one view's object histories to per-object position predictions,
/// aligned with the history order. Pluggable so tests can substitute an
/// oracle for the learned network.
using Predictor = std::function<std::vector<Vec3>(const std::vector<TrajectoryHistory>&)>;

Predictor network_predictor(const stgnn::ModelParams& params);

struct ViewState {
  int view_id = 0;
  std::vector<TrajectoryHistory> histories;  // aligned with FilterState::object_ids
  std::vector<Mat3> p_state;                 // current per-object state uncertainty
};

struct FilterState {
  std::vector<int> object_ids;
  std::vector<ViewState> views;
  int next_time = 0;
};

/// One filter step at the state's next time index: per view, predict each
/// object's state, propagate P, fuse with the measurements every reporting
/// view contributes, then write the chosen belief back into the history.
/// Objects reported by no view at this frame keep the learned belief.
/// Returns estimates indexed [view][object].
std::vector<std::vector<FusedEstimate>> stgf_step(
    FilterState& state, const std::vector<ObservationGraph>& measurements,
    const Predictor& predictor, const stgnn::ProcessNoise& q,
    Writeback writeback = Writeback::kFused);

std::vector<std::vector<FusedEstimate>> stgf_step(
    FilterState& state, const std::vector<ObservationGraph>& measurements,
    const stgnn::ModelParams& model, const stgnn::ProcessNoise& q,
    Writeback writeback = Writeback::kFused);

/// Drives stgf_step over a frame sequence. The first two frames seed the
/// histories with raw measurements (so motion deltas exist) and initialize
/// P to initial_p * I; fused stepping starts at frame 2.
class StgfFilter {
 public:
  StgfFilter(Predictor predictor, stgnn::ProcessNoise q, Writeback writeback = Writeback::kFused,
             double initial_p = 10000.0);
  StgfFilter(const stgnn::ModelParams& model, stgnn::ProcessNoise q,
             Writeback writeback = Writeback::kFused, double initial_p = 10000.0);

  /// Feed the per-view observation graphs of the next frame.
  std::vector<std::vector<FusedEstimate>> step(const std::vector<ObservationGraph>& frame);

  const FilterState& state() const { return state_; }
  int frames_seen() const { return frames_seen_; }

 private:
  Predictor predictor_;
  stgnn::ProcessNoise q_;
  Writeback writeback_;
  double initial_p_;
  FilterState state_;
  int frames_seen_ = 0;
};

}  // namespace stgf::fusion
