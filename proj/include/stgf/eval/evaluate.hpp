#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "stgf/core/types.hpp"
#include "stgf/fusion/filter.hpp"
#include "stgf/sim/scenario.hpp"
#include "stgf/stgnn/model.hpp"

namespace stgf::eval {

struct MissingModelError : std::runtime_error {
  explicit MissingModelError(const std::string& what) : std::runtime_error(what) {}
};

struct ViewsOutOfRangeError : std::runtime_error {
  explicit ViewsOutOfRangeError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateRangeError : std::runtime_error {
  explicit DegenerateRangeError(const std::string& what) : std::runtime_error(what) {}
};

enum class MethodId { kStgf, kStgnnOnly, kKalmanCv, kAom };

MethodId method_from_string(const std::string& s);
std::string to_string(MethodId m);

struct MetricRow {
  MethodId method = MethodId::kAom;
  int views_used = 0;
  int n_instances = 0;
  double de_mean = 0.0;
  double de_std = 0.0;
  double relde_mean = 0.0;
  double relde_std = 0.0;
  double runtime_ms = 0.0;
  long n_points = 0;  // scored samples behind de_mean; in-memory only
};

/// Euclidean distance between estimate and ground truth, meters.
double displacement_error(const Vec3& estimate, const Vec3& truth);

/// DE normalized by the sensor-to-truth distance.
double rel_displacement_error(const Vec3& estimate, const Vec3& truth, const Vec3& sensor);

struct EvalOptions {
  int warmup_frames = 2;
  double process_noise = 2000.0;  // stgf q, added to P every step
  fusion::Writeback writeback = fusion::Writeback::kFused;
  bool collapse = false;       // score the view-averaged estimate instead of per view
  bool relde_origin = false;   // Rel-DE over ||truth|| instead of ||truth - sensor||
  double cv_process_noise = 0.5;
  int threads = 1;             // instances processed in parallel; results identical
};

/// Scores one method on every frame after warmup, per view, against ground
/// truth. Views are the dataset-order prefix of length views_used.
MetricRow evaluate(const sim::Dataset& dataset, const stgnn::ModelParams* model, MethodId method,
                   int views_used, const EvalOptions& opts = {});

/// One MetricRow per view count over the same instance set.
std::vector<MetricRow> sweep_views(const sim::Dataset& dataset, const stgnn::ModelParams* model,
                                   MethodId method, int min_views, int max_views,
                                   const EvalOptions& opts = {});

}  // namespace stgf::eval
