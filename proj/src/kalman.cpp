#include "stgf/kalman/kalman.hpp"

#include <cmath>

namespace stgf::kalman {

namespace {

void check_model(const KfState& s, const LinearGaussianModel& m) {
  const auto d = s.x.rows();
  if (s.p.rows() != d || s.p.cols() != d) throw DimensionMismatchError("state covariance is not d x d");
  if (m.f.rows() != d || m.f.cols() != d) throw DimensionMismatchError("transition matrix is not d x d");
  if (m.h.rows() != 3 || m.h.cols() != d) throw DimensionMismatchError("measurement matrix is not 3 x d");
  if (m.q.rows() != d || m.q.cols() != d) throw DimensionMismatchError("process covariance is not d x d");
  if (m.r.rows() != 3 || m.r.cols() != 3) throw DimensionMismatchError("measurement covariance is not 3 x 3");
}

MatN resym(const MatN& p) { return (p + p.transpose()) / 2; }

}  // namespace

KfState kf_predict(const KfState& s, const LinearGaussianModel& m) {
  check_model(s, m);
  KfState out;
  out.x = m.f * s.x;
  out.p = resym(m.f * s.p * m.f.transpose() + m.q);
  return out;
}

MatN kalman_gain(const KfState& s, const LinearGaussianModel& m) {
  check_model(s, m);
  const MatN innovation = m.h * s.p * m.h.transpose() + m.r;
  Eigen::FullPivLU<MatN> lu(innovation);
  if (!lu.isInvertible()) throw SingularInnovationError("innovation covariance is singular");
  return s.p * m.h.transpose() * lu.inverse();
}

KfState kf_update(const KfState& s, const Vec3& z, const LinearGaussianModel& m) {
  const MatN k = kalman_gain(s, m);
  KfState out;
  out.x = s.x + k * (z - m.h * s.x);
  out.p = resym((MatN::Identity(s.x.rows(), s.x.rows()) - k * m.h) * s.p);
  return out;
}

LinearGaussianModel constant_velocity_model(double dt, const Mat3& r, double process_noise) {
  LinearGaussianModel m;
  m.f = MatN::Identity(6, 6);
  m.f.topRightCorner(3, 3) = dt * Mat3::Identity();
  m.h = MatN::Zero(3, 6);
  m.h.leftCols(3) = Mat3::Identity();
  m.q = MatN::Identity(6, 6) * process_noise;
  m.q.topLeftCorner(3, 3) *= dt * dt;
  m.r = r;
  return m;
}

GaussianBelief cv_track(const TrajectoryHistory& history, double dt, const CvConfig& cfg) {
  if (history.points.size() < 2) throw DimensionMismatchError("cv_track needs a history of length >= 2");

  const auto& first = history.points.front().second;
  KfState s;
  s.x = VecN::Zero(6);
  s.x.head(3) = first.mean;
  s.p = MatN::Zero(6, 6);
  s.p.topLeftCorner(3, 3) = first.cov;
  s.p.bottomRightCorner(3, 3) = cfg.init_velocity_var * Mat3::Identity();

  for (std::size_t k = 1; k < history.points.size(); ++k) {
    const auto& b = history.points[k].second;
    const LinearGaussianModel m = constant_velocity_model(dt, b.cov, cfg.process_noise);
    s = kf_predict(s, m);
    s = kf_update(s, b.mean, m);
  }
  const LinearGaussianModel m = constant_velocity_model(dt, history.back().cov, cfg.process_noise);
  s = kf_predict(s, m);

  GaussianBelief out;
  out.mean = s.x.head(3);
  out.cov = (s.p.topLeftCorner(3, 3) + s.p.topLeftCorner(3, 3).transpose()) / 2;
  return out;
}

}  // namespace stgf::kalman
