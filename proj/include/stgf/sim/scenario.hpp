#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stgf/core/types.hpp"

namespace stgf::sim {

struct InvalidConfigError : std::runtime_error {
  explicit InvalidConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ScenarioKind { kCad, kMpl };

std::string to_string(ScenarioKind kind);
ScenarioKind kind_from_string(const std::string& s);

/// Synthetic scenario parameters. "cad" is an intersection world where
/// vehicles brake for crossing pedestrians; "mpl" is a goal-seeking crowd
/// with pairwise repulsion. Both keep ground truth on the z = 0 plane.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kCad;
  int n_objects = 3;
  int n_views = 4;
  int n_frames = 8;
  double dt = 0.1;
  std::vector<double> noise_sigma_per_view;  // meters, one entry per view
  double view_bias_sigma = 0.0;              // per-view constant offset, meters
  double interaction_strength = 1.0;
  double misreport_r = 1.0;                  // scales recorded R away from truth
  double drop_prob = 0.0;                    // per (view, frame>=2, object)
  std::uint64_t seed = 0;

  static ScenarioConfig cad_defaults();
  static ScenarioConfig mpl_defaults();
  void validate() const;
};

struct ViewFrameObject {
  int id = 0;
  Vec3 z = Vec3::Zero();
  Mat3 r = Mat3::Identity();
};

struct ViewFrame {
  int t = 0;
  std::vector<ViewFrameObject> objects;
};

struct ViewRecord {
  int view_id = 0;
  double noise_sigma = 0.0;
  Vec3 bias = Vec3::Zero();
  std::vector<ViewFrame> frames;
};

/// One multi-view, multi-object, multi-frame scenario with ground truth.
struct DataInstance {
  int instance_id = 0;
  ScenarioConfig config;  // echo of the generating config
  std::vector<Vec3> sensors;
  std::vector<std::vector<Vec3>> truth;  // [frame][object]
  std::vector<ViewRecord> views;
  int retries = 0;  // seed retries needed for the coupling check; not serialized
};

struct Dataset {
  ScenarioConfig config;
  std::vector<DataInstance> instances;
};

/// Deterministic given config.seed; instance k draws from a stream derived
/// with derive_seed(seed, k, retry). cad instances with interaction on are
/// regenerated under new retry streams until some vehicle drops below half
/// of its cruise speed.
std::vector<DataInstance> generate(const ScenarioConfig& config, int n_instances);

Dataset generate_dataset(const ScenarioConfig& config, int n_instances);

/// The observation graph of one view at one frame: nodes in id order, complete
/// edge set over node indices.
ObservationGraph observation_graph(const DataInstance& inst, int view_index, int frame);

bool operator==(const ViewFrameObject& a, const ViewFrameObject& b);
bool operator==(const ViewFrame& a, const ViewFrame& b);
bool operator==(const ViewRecord& a, const ViewRecord& b);
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);
bool operator==(const DataInstance& a, const DataInstance& b);

}  // namespace stgf::sim
