#pragma once

// Helpers shared by the unit suites and the acceptance runner.

#include <string>
#include <vector>

#include "stgf/core/rng.hpp"
#include "stgf/core/types.hpp"
#include "stgf/stgnn/model.hpp"
#include "stgf/stgnn/network.hpp"

namespace test_util {

/// A seeded scenario-free instance: per-object noisy histories plus a truth
/// target, enough to drive forward/backward in isolation.
struct MiniInstance {
  std::vector<stgf::TrajectoryHistory> histories;
  std::vector<stgf::Vec3> truth;
};

inline MiniInstance make_mini_instance(int n_objects, int n_frames, std::uint64_t seed) {
  stgf::Rng rng(seed);
  MiniInstance inst;
  for (int i = 0; i < n_objects; ++i) {
    stgf::TrajectoryHistory h;
    h.object_id = i;
    const stgf::Vec3 start(rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0);
    const stgf::Vec3 vel(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0);
    for (int t = 0; t < n_frames; ++t) {
      const stgf::Vec3 pos = start + vel * (0.1 * t) + rng.gauss_vec3(0.05);
      h.points.emplace_back(t, stgf::GaussianBelief{pos, 0.01 * stgf::Mat3::Identity()});
    }
    inst.histories.push_back(std::move(h));
    inst.truth.push_back(start + vel * (0.1 * n_frames) + rng.gauss_vec3(0.05));
  }
  return inst;
}

struct GradCheckResult {
  std::string tensor;
  double max_rel_error = 0.0;
};

/// Central finite differences (step eps) against the reverse-mode gradients,
/// one relative error per tensor: ||g - g_fd||_inf / max(||g||_inf,
/// ||g_fd||_inf, 1e-12). The finite-difference side goes through the plain
/// forward path, so this also pins tape and plain forward together.
inline std::vector<GradCheckResult> gradient_check(const MiniInstance& inst,
                                                   const stgf::stgnn::ModelParams& params,
                                                   double eps = 1e-5) {
  using stgf::stgnn::ModelParams;
  using stgf::stgnn::Tensor;

  const ModelParams analytic = stgf::stgnn::backward(inst.histories, inst.truth, params);

  ModelParams work = params;
  std::vector<Tensor*> work_tensors;
  stgf::stgnn::for_each_tensor(work, [&](const char*, Tensor& t) { work_tensors.push_back(&t); });
  std::vector<const Tensor*> grad_tensors;
  stgf::stgnn::for_each_tensor(analytic,
                               [&](const char*, const Tensor& t) { grad_tensors.push_back(&t); });
  std::vector<std::string> names;
  stgf::stgnn::for_each_tensor(params,
                               [&](const char* n, const Tensor&) { names.emplace_back(n); });

  const auto loss_at = [&]() {
    return stgf::stgnn::loss(stgf::stgnn::forward(inst.histories, work), inst.truth);
  };

  std::vector<GradCheckResult> results;
  for (std::size_t k = 0; k < work_tensors.size(); ++k) {
    Tensor fd = Tensor::Zero(work_tensors[k]->rows(), work_tensors[k]->cols());
    for (Eigen::Index r = 0; r < fd.rows(); ++r) {
      for (Eigen::Index c = 0; c < fd.cols(); ++c) {
        const double saved = (*work_tensors[k])(r, c);
        (*work_tensors[k])(r, c) = saved + eps;
        const double up = loss_at();
        (*work_tensors[k])(r, c) = saved - eps;
        const double down = loss_at();
        (*work_tensors[k])(r, c) = saved;
        fd(r, c) = (up - down) / (2.0 * eps);
      }
    }
    const double scale = std::max({grad_tensors[k]->template lpNorm<Eigen::Infinity>(),
                                   fd.lpNorm<Eigen::Infinity>(), 1e-12});
    results.push_back(
        {names[k], (*grad_tensors[k] - fd).template lpNorm<Eigen::Infinity>() / scale});
  }
  return results;
}

}  // namespace test_util
