#include "stgf/stgnn/train.hpp"

#include <cmath>

#include "stgf/core/rng.hpp"

namespace stgf::stgnn {

namespace {

std::vector<Tensor*> tensor_ptrs(ModelParams& p) {
  std::vector<Tensor*> out;
  for_each_tensor(p, [&](const char*, Tensor& t) { out.push_back(&t); });
  return out;
}

void apply_step(ModelParams& params, ModelParams& grad, int batch_n, const TrainConfig& cfg) {
  if (batch_n == 0) return;
  auto gp = tensor_ptrs(grad);
  auto pp = tensor_ptrs(params);
  double sq_norm = 0.0;
  for (Tensor* g : gp) {
    *g /= static_cast<double>(batch_n);
    sq_norm += g->squaredNorm();
  }
  const double norm = std::sqrt(sq_norm);
  const double scale = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;
  for (std::size_t i = 0; i < gp.size(); ++i) {
    *pp[i] -= cfg.learning_rate * scale * (*gp[i]);
    gp[i]->setZero();
  }
}

}  // namespace

std::vector<TrajectoryHistory> measurement_histories(const sim::DataInstance& inst, int view,
                                                     int n_frames) {
  const sim::ViewRecord& rec = inst.views.at(view);
  std::vector<TrajectoryHistory> out;
  for (int i = 0; i < inst.config.n_objects; ++i) {
    TrajectoryHistory h;
    h.view_id = rec.view_id;
    h.object_id = i;
    bool complete = true;
    for (int t = 0; t < n_frames; ++t) {
      const sim::ViewFrame& frame = rec.frames.at(t);
      const sim::ViewFrameObject* found = nullptr;
      for (const auto& o : frame.objects) {
        if (o.id == i) {
          found = &o;
          break;
        }
      }
      if (!found) {
        complete = false;
        break;
      }
      h.points.emplace_back(t, GaussianBelief{found->z, found->r});
    }
    if (complete) out.push_back(std::move(h));
  }
  return out;
}

TrainResult train(const std::vector<sim::DataInstance>& dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw EmptyDatasetError("training dataset is empty");
  if (cfg.batch_size < 1) throw EmptyDatasetError("batch_size must be >= 1");

  TrainResult result;
  result.params = ModelParams::seeded(cfg.seed);
  if (cfg.epochs <= 0) return result;

  ModelParams grad = ModelParams::zeros();
  Rng rng(derive_seed(cfg.seed, 0x7261696e));  // independent of the init stream

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    long n_samples = 0;
    int batch_n = 0;
    for (const auto& inst : dataset) {
      const int n_frames = inst.config.n_frames;
      for (int v = 0; v < inst.config.n_views; ++v) {
        const int target_t = rng.uniform_int(2, n_frames - 1);
        auto histories = measurement_histories(inst, v, target_t);
        if (histories.empty()) continue;
        std::vector<Vec3> truths;
        truths.reserve(histories.size());
        for (const auto& h : histories) truths.push_back(inst.truth[target_t][h.object_id]);
        loss_sum += backward_into(histories, truths, result.params, grad);
        ++n_samples;
        if (++batch_n == cfg.batch_size) {
          apply_step(result.params, grad, batch_n, cfg);
          batch_n = 0;
        }
      }
    }
    apply_step(result.params, grad, batch_n, cfg);
    result.epoch_loss.push_back(n_samples > 0 ? loss_sum / static_cast<double>(n_samples) : 0.0);
  }
  return result;
}

}  // namespace stgf::stgnn
