#include "stgf/fusion/filter.hpp"

#include <algorithm>
#include <set>

namespace stgf::fusion {

Writeback writeback_from_string(const std::string& s) {
  if (s == "fused") return Writeback::kFused;
  if (s == "learned") return Writeback::kLearned;
  if (s == "raw") return Writeback::kRaw;
  throw std::invalid_argument("unknown writeback mode: " + s);
}

std::string to_string(Writeback wb) {
  switch (wb) {
    case Writeback::kFused:
      return "fused";
    case Writeback::kLearned:
      return "learned";
    default:
      return "raw";
  }
}

Predictor network_predictor(const stgnn::ModelParams& params) {
  return [params](const std::vector<TrajectoryHistory>& histories) {
    return stgnn::forward(histories, params);
  };
}

namespace {

void check_known_ids(const FilterState& state, const std::vector<ObservationGraph>& measurements) {
  for (const auto& g : measurements) {
    for (const auto& node : g.nodes) {
      if (std::find(state.object_ids.begin(), state.object_ids.end(), node.object_id) ==
          state.object_ids.end()) {
        throw ObjectSetMismatchError("measurement for untracked object id " +
                                     std::to_string(node.object_id));
      }
    }
  }
}

}  // namespace

std::vector<std::vector<FusedEstimate>> stgf_step(FilterState& state,
                                                  const std::vector<ObservationGraph>& measurements,
                                                  const Predictor& predictor,
                                                  const stgnn::ProcessNoise& q,
                                                  Writeback writeback) {
  const std::size_t n_views = state.views.size();
  if (measurements.size() != n_views)
    throw CountMismatchError("one observation graph per view is required");
  check_known_ids(state, measurements);

  const int t = state.next_time;
  const std::size_t n_objects = state.object_ids.size();

  // Learned predictions, one batched pass per view.
  std::vector<std::vector<Vec3>> predicted(n_views);
  for (std::size_t v = 0; v < n_views; ++v) predicted[v] = predictor(state.views[v].histories);

  // Measurements pooled across reporting views, per object.
  std::vector<std::vector<Vec3>> z_all(n_objects);
  std::vector<std::vector<Mat3>> r_all(n_objects);
  std::vector<std::vector<int>> reporting(n_objects);
  for (std::size_t v = 0; v < n_views; ++v) {
    for (std::size_t oi = 0; oi < n_objects; ++oi) {
      if (const ObservationNode* node = measurements[v].find(state.object_ids[oi])) {
        z_all[oi].push_back(node->belief.mean);
        r_all[oi].push_back(node->belief.cov);
        reporting[oi].push_back(state.views[v].view_id);
      }
    }
  }

  std::vector<std::vector<FusedEstimate>> estimates(n_views);
  for (std::size_t v = 0; v < n_views; ++v) {
    ViewState& view = state.views[v];
    estimates[v].resize(n_objects);
    for (std::size_t oi = 0; oi < n_objects; ++oi) {
      const Vec3& x = predicted[v][oi];
      const Mat3 p = stgnn::propagate_uncertainty(view.p_state[oi], q);

      FusedEstimate est;
      est.contributing_views = reporting[oi];
      if (z_all[oi].empty()) {
        est.belief = GaussianBelief{x, p};
      } else {
        const FusionGains gains = fusion_gains(p, r_all[oi]);
        est.belief = GaussianBelief{fuse_state(x, z_all[oi], gains),
                                    fuse_uncertainty(p, r_all[oi])};
      }

      switch (writeback) {
        case Writeback::kFused:
          view.histories[oi].points.emplace_back(t, est.belief);
          view.p_state[oi] = est.belief.cov;
          break;
        case Writeback::kLearned:
          view.histories[oi].points.emplace_back(t, GaussianBelief{x, p});
          view.p_state[oi] = p;
          break;
        case Writeback::kRaw: {
          const ObservationNode* own = measurements[v].find(state.object_ids[oi]);
          view.histories[oi].points.emplace_back(t, own ? own->belief : est.belief);
          view.p_state[oi] = est.belief.cov;
          break;
        }
      }
      estimates[v][oi] = std::move(est);
    }
  }
  state.next_time = t + 1;
  return estimates;
}

std::vector<std::vector<FusedEstimate>> stgf_step(FilterState& state,
                                                  const std::vector<ObservationGraph>& measurements,
                                                  const stgnn::ModelParams& model,
                                                  const stgnn::ProcessNoise& q,
                                                  Writeback writeback) {
  return stgf_step(state, measurements, network_predictor(model), q, writeback);
}

StgfFilter::StgfFilter(Predictor predictor, stgnn::ProcessNoise q, Writeback writeback,
                       double initial_p)
    : predictor_(std::move(predictor)), q_(q), writeback_(writeback), initial_p_(initial_p) {}

StgfFilter::StgfFilter(const stgnn::ModelParams& model, stgnn::ProcessNoise q, Writeback writeback,
                       double initial_p)
    : StgfFilter(network_predictor(model), q, writeback, initial_p) {}

std::vector<std::vector<FusedEstimate>> StgfFilter::step(
    const std::vector<ObservationGraph>& frame) {
  if (frames_seen_ >= 2) {
    ++frames_seen_;
    return stgf_step(state_, frame, predictor_, q_, writeback_);
  }

  if (frames_seen_ == 0) {
    std::set<int> ids;
    for (const auto& g : frame) {
      for (const auto& node : g.nodes) ids.insert(node.object_id);
    }
    state_.object_ids.assign(ids.begin(), ids.end());
    state_.views.resize(frame.size());
    for (std::size_t v = 0; v < frame.size(); ++v) {
      ViewState& view = state_.views[v];
      view.view_id = frame[v].view_id;
      view.histories.resize(state_.object_ids.size());
      view.p_state.assign(state_.object_ids.size(), initial_p_ * Mat3::Identity());
      for (std::size_t oi = 0; oi < state_.object_ids.size(); ++oi) {
        view.histories[oi].view_id = frame[v].view_id;
        view.histories[oi].object_id = state_.object_ids[oi];
      }
    }
  }

  // Seed frames: every view must report every tracked object so histories
  // stay aligned for the encoder.
  const int t = state_.next_time;
  std::vector<std::vector<FusedEstimate>> estimates(state_.views.size());
  for (std::size_t v = 0; v < state_.views.size(); ++v) {
    ViewState& view = state_.views[v];
    estimates[v].resize(state_.object_ids.size());
    for (std::size_t oi = 0; oi < state_.object_ids.size(); ++oi) {
      const ObservationNode* node = frame.at(v).find(state_.object_ids[oi]);
      if (!node)
        throw ObjectSetMismatchError("object " + std::to_string(state_.object_ids[oi]) +
                                     " missing from view during seeding");
      view.histories[oi].points.emplace_back(t, node->belief);
      estimates[v][oi] = FusedEstimate{node->belief, {view.view_id}};
    }
  }
  state_.next_time = t + 1;
  ++frames_seen_;
  return estimates;
}

}  // namespace stgf::fusion
