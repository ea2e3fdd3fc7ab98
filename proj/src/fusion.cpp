#include "stgf/fusion/fusion.hpp"

#include "stgf/kalman/kalman.hpp"

namespace stgf::fusion {

namespace {

/// (P^-1 + sum_v R_v^-1)^-1, the shared left factor of Eqs. 15-18.
Mat3 information_inverse(const Mat3& p, const std::vector<Mat3>& r_all) {
  Mat3 info = invert_spd(p);
  for (const auto& r : r_all) info += invert_spd(r);
  return invert_spd(info);
}

}  // namespace

Mat3 estimation_gain(const Mat3& p, const std::vector<Mat3>& r_all) {
  if (r_all.empty())
    throw EmptyViewsError("no reporting views; caller must keep the learned belief");
  return information_inverse(p, r_all) * invert_spd(p);
}

Mat3 measurement_gain(const Mat3& p, const std::vector<Mat3>& r_all, std::size_t v) {
  if (r_all.empty())
    throw EmptyViewsError("no reporting views; caller must keep the learned belief");
  if (v >= r_all.size()) throw IndexOutOfRangeError("view index out of range");
  return information_inverse(p, r_all) * invert_spd(r_all[v]);
}

FusionGains fusion_gains(const Mat3& p, const std::vector<Mat3>& r_all) {
  if (r_all.empty())
    throw EmptyViewsError("no reporting views; caller must keep the learned belief");
  const Mat3 shared = information_inverse(p, r_all);
  FusionGains gains;
  gains.e = shared * invert_spd(p);
  gains.m_per_view.reserve(r_all.size());
  for (const auto& r : r_all) gains.m_per_view.push_back(shared * invert_spd(r));
  return gains;
}

Vec3 fuse_state(const Vec3& x, const std::vector<Vec3>& z_all, const FusionGains& gains) {
  if (z_all.size() != gains.m_per_view.size())
    throw CountMismatchError("measurement count does not match gain count");
  Vec3 fused = gains.e * x;
  for (std::size_t v = 0; v < z_all.size(); ++v) fused += gains.m_per_view[v] * z_all[v];
  return fused;
}

Mat3 fuse_uncertainty(const Mat3& p, const std::vector<Mat3>& r_all) {
  return information_inverse(p, r_all);
}

Mat3 random_spd(Rng& rng, double ridge) {
  Mat3 a;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a(r, c) = rng.uniform(-1.0, 1.0);
  }
  return symmetrized(a * a.transpose() + ridge * Mat3::Identity());
}

namespace {

kalman::LinearGaussianModel identity_model(const Mat3& r) {
  kalman::LinearGaussianModel m;
  m.f = Mat3::Identity();
  m.h = Mat3::Identity();
  m.q = Mat3::Zero();
  m.r = r;
  return m;
}

template <typename DeviationFn>
TheoremReport run_trials(int trials, std::uint64_t seed, DeviationFn&& deviation) {
  TheoremReport report;
  report.trials = trials;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Mat3 p = random_spd(rng);
    const Mat3 r = random_spd(rng);
    const double dev = deviation(p, r);
    report.max_deviation = std::max(report.max_deviation, dev);
    if (!(dev < report.tolerance)) ++report.failures;
  }
  return report;
}

}  // namespace

TheoremReport verify_theorem1(int trials, std::uint64_t seed) {
  return run_trials(trials, seed, [](const Mat3& p, const Mat3& r) {
    const Mat3 m = measurement_gain(p, {r}, 0);
    const kalman::KfState s{kalman::VecN::Zero(3), p};
    const kalman::MatN k = kalman::kalman_gain(s, identity_model(r));
    return (m - k).lpNorm<Eigen::Infinity>();
  });
}

TheoremReport verify_theorem2(int trials, std::uint64_t seed) {
  return run_trials(trials, seed, [](const Mat3& p, const Mat3& r) {
    const Mat3 fused = fuse_uncertainty(p, {r});
    const kalman::KfState s{kalman::VecN::Zero(3), p};
    const kalman::MatN k = kalman::kalman_gain(s, identity_model(r));
    const Mat3 updated = (Mat3::Identity() - k) * p;
    return (fused - updated).lpNorm<Eigen::Infinity>();
  });
}

}  // namespace stgf::fusion
