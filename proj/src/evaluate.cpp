#include "stgf/eval/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "stgf/kalman/kalman.hpp"
#include "stgf/stgnn/train.hpp"

namespace stgf::eval {

MethodId method_from_string(const std::string& s) {
  if (s == "stgf") return MethodId::kStgf;
  if (s == "stgnn_only") return MethodId::kStgnnOnly;
  if (s == "kalman_cv") return MethodId::kKalmanCv;
  if (s == "aom") return MethodId::kAom;
  throw std::invalid_argument("unknown method: " + s);
}

std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::kStgf:
      return "stgf";
    case MethodId::kStgnnOnly:
      return "stgnn_only";
    case MethodId::kKalmanCv:
      return "kalman_cv";
    default:
      return "aom";
  }
}

double displacement_error(const Vec3& estimate, const Vec3& truth) {
  return (estimate - truth).norm();
}

double rel_displacement_error(const Vec3& estimate, const Vec3& truth, const Vec3& sensor) {
  const double range = (truth - sensor).norm();
  if (range <= 1e-6) throw DegenerateRangeError("object coincides with the sensor");
  return displacement_error(estimate, truth) / range;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  long n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  void merge(const Accumulator& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    n += other.n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double sample_std() const {
    if (n < 2) return 0.0;
    const double var = (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
};

struct InstanceScores {
  Accumulator de;
  Accumulator relde;
};

/// Scores one estimate for a given (frame, object): DE once (or per view when
/// not collapsed), Rel-DE against each view's sensor.
void score_point(InstanceScores& acc, const Vec3& estimate, const Vec3& truth,
                 const sim::DataInstance& inst, const std::vector<int>& views,
                 const EvalOptions& opts, bool de_once) {
  const double de = displacement_error(estimate, truth);
  if (de_once) {
    acc.de.add(de);
  } else {
    for (std::size_t k = 0; k < views.size(); ++k) acc.de.add(de);
  }
  for (int v : views) {
    const double denom = opts.relde_origin ? truth.norm() : (truth - inst.sensors[v]).norm();
    if (denom <= 1e-6) throw DegenerateRangeError("object coincides with the sensor");
    acc.relde.add(de / denom);
  }
}

void eval_stgf(const sim::DataInstance& inst, const stgnn::ModelParams& model, int views_used,
               const EvalOptions& opts, InstanceScores& acc) {
  fusion::StgfFilter filter(model, stgnn::ProcessNoise::isotropic(opts.process_noise),
                            opts.writeback);
  const int n_frames = inst.config.n_frames;
  for (int t = 0; t < n_frames; ++t) {
    std::vector<ObservationGraph> graphs;
    graphs.reserve(views_used);
    for (int v = 0; v < views_used; ++v) graphs.push_back(sim::observation_graph(inst, v, t));
    const auto estimates = filter.step(graphs);
    if (t < opts.warmup_frames) continue;

    const auto& ids = filter.state().object_ids;
    for (std::size_t oi = 0; oi < ids.size(); ++oi) {
      const Vec3& truth = inst.truth[t][ids[oi]];
      if (opts.collapse) {
        Vec3 mean = Vec3::Zero();
        for (int v = 0; v < views_used; ++v) mean += estimates[v][oi].belief.mean;
        mean /= static_cast<double>(views_used);
        std::vector<int> views(views_used);
        for (int v = 0; v < views_used; ++v) views[v] = v;
        score_point(acc, mean, truth, inst, views, opts, true);
      } else {
        for (int v = 0; v < views_used; ++v) {
          score_point(acc, estimates[v][oi].belief.mean, truth, inst, {v}, opts, false);
        }
      }
    }
  }
}

void eval_per_view_predictor(const sim::DataInstance& inst, const stgnn::ModelParams* model,
                             MethodId method, int views_used, const EvalOptions& opts,
                             InstanceScores& acc) {
  const int n_frames = inst.config.n_frames;
  const int first_t = std::max(opts.warmup_frames, 2);
  for (int v = 0; v < views_used; ++v) {
    for (int t = first_t; t < n_frames; ++t) {
      const auto histories = stgnn::measurement_histories(inst, v, t);
      if (histories.empty()) continue;
      if (method == MethodId::kStgnnOnly) {
        const auto predictions = stgnn::forward(histories, *model);
        for (std::size_t i = 0; i < histories.size(); ++i) {
          score_point(acc, predictions[i], inst.truth[t][histories[i].object_id], inst, {v}, opts,
                      false);
        }
      } else {
        kalman::CvConfig cv;
        cv.process_noise = opts.cv_process_noise;
        for (const auto& h : histories) {
          const GaussianBelief belief = kalman::cv_track(h, inst.config.dt, cv);
          score_point(acc, belief.mean, inst.truth[t][h.object_id], inst, {v}, opts, false);
        }
      }
    }
  }
}

void eval_aom(const sim::DataInstance& inst, int views_used, const EvalOptions& opts,
              InstanceScores& acc) {
  const int n_frames = inst.config.n_frames;
  for (int t = opts.warmup_frames; t < n_frames; ++t) {
    for (int id = 0; id < inst.config.n_objects; ++id) {
      Vec3 sum = Vec3::Zero();
      std::vector<int> reporting;
      for (int v = 0; v < views_used; ++v) {
        for (const auto& o : inst.views[v].frames[t].objects) {
          if (o.id == id) {
            sum += o.z;
            reporting.push_back(v);
            break;
          }
        }
      }
      if (reporting.empty()) continue;
      const Vec3 mean = sum / static_cast<double>(reporting.size());
      score_point(acc, mean, inst.truth[t][id], inst, reporting, opts, opts.collapse);
    }
  }
}

InstanceScores eval_instance(const sim::DataInstance& inst, const stgnn::ModelParams* model,
                             MethodId method, int views_used, const EvalOptions& opts) {
  InstanceScores acc;
  switch (method) {
    case MethodId::kStgf:
      eval_stgf(inst, *model, views_used, opts, acc);
      break;
    case MethodId::kStgnnOnly:
    case MethodId::kKalmanCv:
      eval_per_view_predictor(inst, model, method, views_used, opts, acc);
      break;
    case MethodId::kAom:
      eval_aom(inst, views_used, opts, acc);
      break;
  }
  return acc;
}

}  // namespace

MetricRow evaluate(const sim::Dataset& dataset, const stgnn::ModelParams* model, MethodId method,
                   int views_used, const EvalOptions& opts) {
  if ((method == MethodId::kStgf || method == MethodId::kStgnnOnly) && model == nullptr)
    throw MissingModelError("method " + to_string(method) + " needs a model");
  if (views_used < 1 || views_used > dataset.config.n_views)
    throw ViewsOutOfRangeError("views_used must be in [1, " +
                               std::to_string(dataset.config.n_views) + "]");

  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = dataset.instances.size();
  std::vector<InstanceScores> per_instance(n);

  const int threads = std::max(1, opts.threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      per_instance[i] = eval_instance(dataset.instances[i], model, method, views_used, opts);
    }
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (std::size_t i = w; i < n; i += threads) {
            per_instance[i] = eval_instance(dataset.instances[i], model, method, views_used, opts);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  Accumulator de, relde;
  for (const auto& s : per_instance) {
    de.merge(s.de);
    relde.merge(s.relde);
  }
  const auto stop = std::chrono::steady_clock::now();

  MetricRow row;
  row.method = method;
  row.views_used = views_used;
  row.n_instances = static_cast<int>(n);
  row.de_mean = de.mean();
  row.de_std = de.sample_std();
  row.relde_mean = relde.mean();
  row.relde_std = relde.sample_std();
  row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  row.n_points = de.n;
  return row;
}

std::vector<MetricRow> sweep_views(const sim::Dataset& dataset, const stgnn::ModelParams* model,
                                   MethodId method, int min_views, int max_views,
                                   const EvalOptions& opts) {
  if (min_views < 1 || min_views > max_views || max_views > dataset.config.n_views)
    throw ViewsOutOfRangeError("invalid view range");
  std::vector<MetricRow> rows;
  for (int k = min_views; k <= max_views; ++k) {
    rows.push_back(evaluate(dataset, model, method, k, opts));
  }
  return rows;
}

}  // namespace stgf::eval
