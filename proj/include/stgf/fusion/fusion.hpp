#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stgf/core/rng.hpp"
#include "stgf/core/spd.hpp"
#include "stgf/core/types.hpp"

namespace stgf::fusion {

struct EmptyViewsError : std::runtime_error {
  explicit EmptyViewsError(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOutOfRangeError : std::runtime_error {
  explicit IndexOutOfRangeError(const std::string& what) : std::runtime_error(what) {}
};

struct CountMismatchError : std::runtime_error {
  explicit CountMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix weights apportioning trust between the learned estimate and each
/// view's measurement; e + sum(m_per_view) = I.
struct FusionGains {
  Mat3 e;
  std::vector<Mat3> m_per_view;
};

/// E = (P^-1 + sum_v R_v^-1)^-1 P^-1.
Mat3 estimation_gain(const Mat3& p, const std::vector<Mat3>& r_all);

/// M_v = (P^-1 + sum_w R_w^-1)^-1 R_v^-1.
Mat3 measurement_gain(const Mat3& p, const std::vector<Mat3>& r_all, std::size_t v);

/// All gains from one shared information sum.
FusionGains fusion_gains(const Mat3& p, const std::vector<Mat3>& r_all);

/// x_hat = E x + sum_v M_v z_v.
Vec3 fuse_state(const Vec3& x, const std::vector<Vec3>& z_all, const FusionGains& gains);

/// P_hat = (P^-1 + sum_v R_v^-1)^-1.
Mat3 fuse_uncertainty(const Mat3& p, const std::vector<Mat3>& r_all);

struct FusedEstimate {
  GaussianBelief belief;
  std::vector<int> contributing_views;
};

/// Outcome of a randomized equivalence check against the Kalman route.
struct TheoremReport {
  int trials = 0;
  double max_deviation = 0.0;
  int failures = 0;
  double tolerance = 1e-9;
  bool passed() const { return failures == 0; }
};

/// Single-view measurement gain equals the Kalman gain with H = I.
TheoremReport verify_theorem1(int trials, std::uint64_t seed);

/// Single-view fused uncertainty equals (I - K) P.
TheoremReport verify_theorem2(int trials, std::uint64_t seed);

/// Well-conditioned random SPD draw: A A^T + ridge I with A uniform(-1, 1).
Mat3 random_spd(Rng& rng, double ridge = 0.5);

}  // namespace stgf::fusion
