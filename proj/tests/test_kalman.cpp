#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "stgf/core/rng.hpp"
#include "stgf/core/spd.hpp"
#include "stgf/kalman/kalman.hpp"

using namespace stgf;
using namespace stgf::kalman;

namespace {

MatN random_spd_n(Rng& rng, int n) {
  MatN a(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = rng.uniform(-1.0, 1.0);
  }
  return a * a.transpose() + 0.5 * MatN::Identity(n, n);
}

MatN random_matrix(Rng& rng, int rows, int cols) {
  MatN a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) a(r, c) = rng.uniform(-1.0, 1.0);
  }
  return a;
}

LinearGaussianModel identity3(const Mat3& r) {
  return LinearGaussianModel{MatN::Identity(3, 3), MatN::Identity(3, 3), MatN::Zero(3, 3), r};
}

/// Conditions the joint Gaussian of (state, measurement) on the measurement
/// block directly. Independent route for checking kf_update.
KfState condition_joint(const KfState& s, const Vec3& z, const LinearGaussianModel& m) {
  const MatN cross = s.p * m.h.transpose();
  const MatN innov = m.h * s.p * m.h.transpose() + m.r;
  const MatN innov_inv = innov.inverse();
  KfState out;
  out.x = s.x + cross * innov_inv * (z - m.h * s.x);
  out.p = s.p - cross * innov_inv * cross.transpose();
  return out;
}

}  // namespace

TEST_CASE("kf_predict simple cases") {
  KfState s{VecN::Zero(3), MatN::Identity(3, 3)};
  s.x << 1, 2, 3;
  LinearGaussianModel m = identity3(Mat3::Identity());
  m.q = MatN::Identity(3, 3);

  const KfState out = kf_predict(s, m);
  CHECK((out.x - s.x).norm() == 0.0);
  CHECK((out.p - 2.0 * MatN::Identity(3, 3)).norm() == 0.0);

  m.f = MatN::Zero(3, 3);
  const KfState zeroed = kf_predict(s, m);
  CHECK(zeroed.x.norm() == 0.0);
  CHECK((zeroed.p - m.q).norm() == 0.0);
}

TEST_CASE("kf_predict constant-velocity kinematics") {
  const LinearGaussianModel m = constant_velocity_model(0.1, Mat3::Identity());
  KfState s{VecN::Zero(6), MatN::Identity(6, 6)};
  s.x << 0, 0, 0, 1, 0, 0;
  const KfState out = kf_predict(s, m);
  CHECK(out.x.head(3).isApprox(Vec3(0.1, 0.0, 0.0), 1e-12));
  CHECK((out.p - out.p.transpose()).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("kf_predict rejects inconsistent dimensions") {
  KfState s{VecN::Zero(6), MatN::Identity(6, 6)};
  LinearGaussianModel m = identity3(Mat3::Identity());  // 3-dim model on 6-dim state
  CHECK_THROWS_AS(kf_predict(s, m), DimensionMismatchError);
}

TEST_CASE("kalman_gain closed-form cases") {
  KfState s{VecN::Zero(3), MatN::Identity(3, 3)};
  const MatN k = kalman_gain(s, identity3(Mat3::Identity()));
  CHECK((k - 0.5 * MatN::Identity(3, 3)).lpNorm<Eigen::Infinity>() < 1e-12);

  const MatN distrust = kalman_gain(s, identity3(Mat3(1e12 * Mat3::Identity())));
  CHECK(distrust.lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("kalman_gain satisfies its defining equation with H = I") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    KfState s{VecN::Zero(3), random_spd_n(rng, 3)};
    const Mat3 r = random_spd_n(rng, 3);
    const MatN k = kalman_gain(s, identity3(r));
    CHECK((k * (s.p + r) - s.p).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("kf_update closed-form and zero-innovation cases") {
  KfState s{VecN::Zero(3), MatN::Identity(3, 3)};
  const LinearGaussianModel m = identity3(Mat3::Identity());

  const KfState updated = kf_update(s, Vec3(2, 2, 2), m);
  CHECK(updated.x.isApprox(VecN::Ones(3), 1e-12));
  CHECK((updated.p - 0.5 * MatN::Identity(3, 3)).lpNorm<Eigen::Infinity>() < 1e-12);

  KfState s2{VecN::Zero(3), MatN::Identity(3, 3)};
  s2.x << 4, -1, 2;
  const KfState same = kf_update(s2, Vec3(4, -1, 2), m);
  CHECK((same.x - s2.x).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("kf_update matches joint-Gaussian conditioning") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 6;
    KfState s;
    s.x = random_matrix(rng, d, 1);
    s.p = random_spd_n(rng, d);
    LinearGaussianModel m;
    m.f = MatN::Identity(d, d);
    m.h = random_matrix(rng, 3, d);
    m.q = MatN::Zero(d, d);
    m.r = random_spd_n(rng, 3);
    const Vec3 z = random_matrix(rng, 3, 1);

    const KfState ours = kf_update(s, z, m);
    const KfState oracle = condition_joint(s, z, m);
    CHECK((ours.x - oracle.x).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((ours.p - oracle.p).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("kf_update with H = I never increases the covariance trace") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    KfState s{random_matrix(rng, 3, 1), random_spd_n(rng, 3)};
    const Mat3 r = random_spd_n(rng, 3);
    const KfState out = kf_update(s, random_matrix(rng, 3, 1), identity3(r));
    CHECK(out.p.trace() <= s.p.trace() + 1e-12);
    CHECK((out.p - out.p.transpose()).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("cv_track predicts the next point of a noise-free line") {
  // The generating line provides the closed-form next position.
  const Vec3 start(2.0, -1.0, 0.0);
  const Vec3 velocity(1.2, 0.4, 0.0);
  const double dt = 0.1;
  const int len = 80;

  TrajectoryHistory h;
  h.object_id = 0;
  for (int t = 0; t < len; ++t) {
    h.points.emplace_back(t, GaussianBelief{start + velocity * (dt * t), 1e-6 * Mat3::Identity()});
  }
  const Vec3 expected = start + velocity * (dt * len);

  CvConfig cfg;
  cfg.process_noise = 0.01;
  const GaussianBelief out = cv_track(h, dt, cfg);
  CHECK((out.mean - expected).norm() < 1e-3);
}

TEST_CASE("cv_track on identical points stays put") {
  TrajectoryHistory h;
  for (int t = 0; t < 12; ++t) {
    h.points.emplace_back(t, GaussianBelief{Vec3(3, 4, 0), 0.01 * Mat3::Identity()});
  }
  const GaussianBelief out = cv_track(h, 0.1);
  CHECK((out.mean - Vec3(3, 4, 0)).norm() < 1e-9);
}

TEST_CASE("cv_track handles the minimal two-point history") {
  TrajectoryHistory h;
  h.points.emplace_back(0, GaussianBelief{Vec3(0, 0, 0), Mat3::Identity()});
  h.points.emplace_back(1, GaussianBelief{Vec3(1, 0, 0), Mat3::Identity()});
  const GaussianBelief out = cv_track(h, 0.1);
  CHECK(out.mean.allFinite());
  CHECK(is_spd(out.cov));
  CHECK_THROWS_AS(cv_track(TrajectoryHistory{}, 0.1), DimensionMismatchError);
}
