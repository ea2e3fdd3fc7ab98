#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace stgf {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;

/// A 3-D location estimate with its covariance. Covariances are kept
/// symmetric positive definite everywhere in the pipeline; see is_spd().
struct GaussianBelief {
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Identity();
};

struct ObservationNode {
  int object_id = 0;
  GaussianBelief belief;
};

/// One view's per-frame graph: measured object locations with covariances,
/// edges over object-id index pairs (complete graph in all generated data).
struct ObservationGraph {
  int view_id = 0;
  int time_index = 0;
  std::vector<ObservationNode> nodes;            // object ids unique
  std::vector<std::pair<int, int>> edges;        // unordered pairs, first < second

  const ObservationNode* find(int object_id) const {
    for (const auto& n : nodes) {
      if (n.object_id == object_id) return &n;
    }
    return nullptr;
  }
};

/// A single object's belief sequence in one view. Time indices are strictly
/// increasing and contiguous.
struct TrajectoryHistory {
  int view_id = 0;
  int object_id = 0;
  std::vector<std::pair<int, GaussianBelief>> points;

  int length() const { return static_cast<int>(points.size()); }
  const GaussianBelief& back() const { return points.back().second; }
};

inline bool history_indices_valid(const TrajectoryHistory& h) {
  if (h.points.size() < 2) return false;
  for (std::size_t k = 1; k < h.points.size(); ++k) {
    if (h.points[k].first != h.points[k - 1].first + 1) return false;
  }
  return true;
}

}  // namespace stgf
