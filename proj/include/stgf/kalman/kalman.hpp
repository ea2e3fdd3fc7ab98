#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "stgf/core/types.hpp"

namespace stgf::kalman {

using MatN = Eigen::MatrixXd;
using VecN = Eigen::VectorXd;

struct DimensionMismatchError : std::runtime_error {
  explicit DimensionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularInnovationError : std::runtime_error {
  explicit SingularInnovationError(const std::string& what) : std::runtime_error(what) {}
};

/// x' = F x + w, z = H x + v with w ~ N(0, Q), v ~ N(0, R). Measurements are
/// 3-D locations throughout, so h is 3 x d and r is 3 x 3.
struct LinearGaussianModel {
  MatN f;
  MatN h;
  MatN q;
  MatN r;
};

struct KfState {
  VecN x;
  MatN p;
};

KfState kf_predict(const KfState& s, const LinearGaussianModel& m);

/// K = P H^T (H P H^T + R)^-1. The innovation inverse goes through an LU
/// factorization, deliberately a different path than the fusion module's
/// closed-form SPD inverse so the theorem checks compare independent routes.
MatN kalman_gain(const KfState& s, const LinearGaussianModel& m);

KfState kf_update(const KfState& s, const Vec3& z, const LinearGaussianModel& m);

struct CvConfig {
  double process_noise = 0.5;       // q in Q = q * diag(dt^2 I, I), m^2
  double init_velocity_var = 100.0;
};

/// Constant-velocity model on the 6-dim [position, velocity] state.
LinearGaussianModel constant_velocity_model(double dt, const Mat3& r, double process_noise = 0.5);

/// Runs predict/update over the history with the constant-velocity model,
/// then one final predict; returns the predicted position marginal.
GaussianBelief cv_track(const TrajectoryHistory& history, double dt, const CvConfig& cfg = {});

}  // namespace stgf::kalman
