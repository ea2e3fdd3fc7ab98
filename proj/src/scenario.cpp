#include "stgf/sim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "stgf/core/rng.hpp"
#include "stgf/core/spd.hpp"

namespace stgf::sim {

std::string to_string(ScenarioKind kind) {
  return kind == ScenarioKind::kCad ? "cad" : "mpl";
}

ScenarioKind kind_from_string(const std::string& s) {
  if (s == "cad") return ScenarioKind::kCad;
  if (s == "mpl") return ScenarioKind::kMpl;
  throw InvalidConfigError("unknown scenario kind: " + s);
}

ScenarioConfig ScenarioConfig::cad_defaults() {
  ScenarioConfig c;
  c.kind = ScenarioKind::kCad;
  c.n_objects = 3;
  c.n_views = 4;
  c.n_frames = 8;
  c.dt = 0.1;  // 10 Hz
  c.noise_sigma_per_view.assign(4, 0.5);
  return c;
}

ScenarioConfig ScenarioConfig::mpl_defaults() {
  ScenarioConfig c;
  c.kind = ScenarioKind::kMpl;
  c.n_objects = 4;
  c.n_views = 7;
  c.n_frames = 20;
  c.dt = 1.0 / 7.0;  // 7 Hz
  c.noise_sigma_per_view.assign(7, 0.3);
  return c;
}

void ScenarioConfig::validate() const {
  if (n_objects < 1) throw InvalidConfigError("n_objects must be >= 1");
  if (n_views < 1) throw InvalidConfigError("n_views must be >= 1");
  if (n_frames < 3) throw InvalidConfigError("n_frames must be >= 3");
  if (dt <= 0) throw InvalidConfigError("dt must be positive");
  if (static_cast<int>(noise_sigma_per_view.size()) != n_views)
    throw InvalidConfigError("noise_sigma_per_view must have one entry per view");
  for (double s : noise_sigma_per_view) {
    if (s < 0) throw InvalidConfigError("noise sigma must be >= 0");
  }
  if (view_bias_sigma < 0) throw InvalidConfigError("view_bias_sigma must be >= 0");
  if (interaction_strength < 0) throw InvalidConfigError("interaction_strength must be >= 0");
  if (misreport_r <= 0) throw InvalidConfigError("misreport_r must be positive");
  if (drop_prob < 0 || drop_prob >= 1) throw InvalidConfigError("drop_prob must be in [0, 1)");
}

namespace {

constexpr double kSigmaFloor = 1e-6;  // keeps recorded R invertible at sigma = 0

struct ObjectInit {
  bool is_vehicle = false;
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 goal = Vec3::Zero();  // mpl only
  double speed = 0.0;        // cruise (cad vehicle) or walking/goal speed
  double lane_y = 0.0;       // cad vehicle lane
};

std::vector<Vec3> draw_sensors(const ScenarioConfig& cfg, Rng& rng) {
  std::vector<Vec3> sensors(cfg.n_views);
  const bool cad = cfg.kind == ScenarioKind::kCad;
  for (int v = 0; v < cfg.n_views; ++v) {
    const double angle = 2.0 * M_PI * v / cfg.n_views + rng.uniform(-0.2, 0.2);
    const double radius = cad ? rng.uniform(12.0, 18.0) : rng.uniform(15.0, 20.0);
    const double height = cad ? rng.uniform(1.5, 3.0) : rng.uniform(2.5, 5.0);
    sensors[v] = Vec3(radius * std::cos(angle), radius * std::sin(angle), height);
  }
  return sensors;
}

std::vector<ObjectInit> init_cad_objects(const ScenarioConfig& cfg, Rng& rng) {
  const double window = cfg.n_frames * cfg.dt;
  std::vector<ObjectInit> objs(cfg.n_objects);
  // Evens are vehicles driving +x, odds are pedestrians crossing +y. Each
  // pedestrian is timed to be inside its paired vehicle's lane mid-window.
  int n_vehicles = 0;
  for (int i = 0; i < cfg.n_objects; ++i) n_vehicles += (i % 2 == 0) ? 1 : 0;
  std::vector<int> vehicle_ids;
  for (int i = 0; i < cfg.n_objects; ++i) {
    ObjectInit& o = objs[i];
    o.is_vehicle = (i % 2 == 0);
    if (o.is_vehicle) {
      const int vi = static_cast<int>(vehicle_ids.size());
      vehicle_ids.push_back(i);
      o.speed = rng.uniform(6.0, 9.0);
      o.lane_y = -1.75 + 3.5 * vi + rng.uniform(-0.3, 0.3);
      const double t_meet = window * rng.uniform(0.25, 0.55);
      const double x_cross = rng.uniform(-1.0, 1.0);
      o.pos = Vec3(x_cross - o.speed * t_meet, o.lane_y, 0.0);
      o.vel = Vec3(o.speed, 0.0, 0.0);
      o.goal = Vec3(x_cross, 0.0, t_meet);  // goal.z caches the meeting time
    }
  }
  for (int i = 0; i < cfg.n_objects; ++i) {
    ObjectInit& o = objs[i];
    if (o.is_vehicle) continue;
    o.speed = rng.uniform(1.0, 1.6);
    if (vehicle_ids.empty()) {
      o.pos = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-4.0, -2.0), 0.0);
    } else {
      const ObjectInit& veh = objs[vehicle_ids[i % vehicle_ids.size()]];
      const double t_meet = veh.goal.z();
      o.pos = Vec3(veh.goal.x() + rng.uniform(-0.4, 0.4),
                   veh.lane_y - o.speed * t_meet + rng.uniform(-0.5, 0.5), 0.0);
    }
    o.vel = Vec3(0.0, o.speed, 0.0);
  }
  return objs;
}

std::vector<ObjectInit> init_mpl_objects(const ScenarioConfig& cfg, Rng& rng) {
  std::vector<ObjectInit> objs(cfg.n_objects);
  const double ring = 8.0 + 0.5 * cfg.n_objects;
  for (int i = 0; i < cfg.n_objects; ++i) {
    ObjectInit& o = objs[i];
    const double angle = 2.0 * M_PI * i / cfg.n_objects + rng.uniform(-0.25, 0.25);
    const double r0 = ring * rng.uniform(0.9, 1.1);
    o.pos = Vec3(r0 * std::cos(angle), r0 * std::sin(angle), 0.0);
    o.goal = -o.pos * rng.uniform(0.9, 1.1);
    o.speed = rng.uniform(0.8, 1.4);
    Vec3 dir = o.goal - o.pos;
    o.vel = o.speed * dir / dir.norm();
  }
  return objs;
}

std::vector<std::vector<Vec3>> roll_cad(const ScenarioConfig& cfg, std::vector<ObjectInit>& objs) {
  const double lookahead = 2.0;
  const double corridor = 3.0;
  const double brake_gain = 5.0 * cfg.interaction_strength;
  std::vector<std::vector<Vec3>> truth(cfg.n_frames, std::vector<Vec3>(cfg.n_objects));
  for (int t = 0; t < cfg.n_frames; ++t) {
    for (int i = 0; i < cfg.n_objects; ++i) truth[t][i] = objs[i].pos;
    for (int i = 0; i < cfg.n_objects; ++i) {
      ObjectInit& o = objs[i];
      if (!o.is_vehicle) {
        o.pos += o.vel * cfg.dt;
        continue;
      }
      double target = o.speed;
      if (cfg.interaction_strength > 0) {
        for (int j = 0; j < cfg.n_objects; ++j) {
          const ObjectInit& p = objs[j];
          if (p.is_vehicle) continue;
          const double gap = p.pos.x() - o.pos.x();
          if (gap < 0) continue;
          const double tau = gap / std::max(o.vel.x(), 0.1);
          if (tau > lookahead) continue;
          const double ped_y = p.pos.y() + p.vel.y() * tau;
          if (std::abs(ped_y - o.lane_y) < corridor) {
            target = 0.0;
            break;
          }
        }
      }
      const double blend = std::min(1.0, brake_gain * cfg.dt);
      o.vel.x() += (target - o.vel.x()) * blend;
      o.pos += o.vel * cfg.dt;
    }
  }
  return truth;
}

std::vector<std::vector<Vec3>> roll_mpl(const ScenarioConfig& cfg, std::vector<ObjectInit>& objs) {
  const double relax = 0.8;
  const double repulse_gain = 2.0 * cfg.interaction_strength;
  const double force_cap = 3.0;
  std::vector<std::vector<Vec3>> truth(cfg.n_frames, std::vector<Vec3>(cfg.n_objects));
  for (int t = 0; t < cfg.n_frames; ++t) {
    for (int i = 0; i < cfg.n_objects; ++i) truth[t][i] = objs[i].pos;
    std::vector<Vec3> forces(cfg.n_objects, Vec3::Zero());
    if (repulse_gain > 0) {
      for (int i = 0; i < cfg.n_objects; ++i) {
        for (int j = 0; j < cfg.n_objects; ++j) {
          if (j == i) continue;
          Vec3 away = objs[i].pos - objs[j].pos;
          const double d = std::max(away.norm(), 0.3);
          const double mag = std::min(repulse_gain / d, force_cap);
          forces[i] += mag * away / d;
        }
      }
    }
    for (int i = 0; i < cfg.n_objects; ++i) {
      ObjectInit& o = objs[i];
      Vec3 dir = o.goal - o.pos;
      const double d = dir.norm();
      const Vec3 v_des = d > 1e-6 ? Vec3(o.speed * dir / d) : o.vel;
      o.vel += ((v_des - o.vel) / relax + forces[i]) * cfg.dt;
      o.pos += o.vel * cfg.dt;
    }
  }
  return truth;
}

bool coupling_fired(const ScenarioConfig& cfg, const std::vector<ObjectInit>& objs,
                    const std::vector<std::vector<Vec3>>& truth) {
  bool has_vehicle = false, has_pedestrian = false;
  for (const auto& o : objs) (o.is_vehicle ? has_vehicle : has_pedestrian) = true;
  if (!has_vehicle || !has_pedestrian) return true;
  for (int i = 0; i < cfg.n_objects; ++i) {
    if (!objs[i].is_vehicle) continue;
    for (int t = 0; t + 1 < cfg.n_frames; ++t) {
      const double speed = (truth[t + 1][i] - truth[t][i]).norm() / cfg.dt;
      if (speed < 0.5 * objs[i].speed) return true;
    }
  }
  return false;
}

DataInstance generate_instance(const ScenarioConfig& cfg, int instance_id) {
  DataInstance inst;
  inst.instance_id = instance_id;
  inst.config = cfg;
  const bool cad = cfg.kind == ScenarioKind::kCad;

  for (int retry = 0;; ++retry) {
    if (retry > 200)
      throw InvalidConfigError("cad coupling never fired; scenario config cannot satisfy it");
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(instance_id), retry));

    inst.sensors = draw_sensors(cfg, rng);
    std::vector<Vec3> biases(cfg.n_views);
    for (auto& b : biases) b = rng.gauss_vec3(cfg.view_bias_sigma);

    auto objs = cad ? init_cad_objects(cfg, rng) : init_mpl_objects(cfg, rng);
    const auto initial = objs;
    inst.truth = cad ? roll_cad(cfg, objs) : roll_mpl(cfg, objs);

    if (cad && cfg.interaction_strength > 0 && !coupling_fired(cfg, initial, inst.truth)) {
      inst.retries = retry + 1;
      continue;
    }

    inst.views.assign(cfg.n_views, {});
    for (int v = 0; v < cfg.n_views; ++v) {
      ViewRecord& rec = inst.views[v];
      rec.view_id = v;
      rec.noise_sigma = cfg.noise_sigma_per_view[v];
      rec.bias = biases[v];
      rec.frames.resize(cfg.n_frames);
    }
    for (int t = 0; t < cfg.n_frames; ++t) {
      for (int v = 0; v < cfg.n_views; ++v) {
        ViewFrame& frame = inst.views[v].frames[t];
        frame.t = t;
        const double sigma = cfg.noise_sigma_per_view[v];
        const double sigma_eff = std::max(sigma, kSigmaFloor);
        for (int i = 0; i < cfg.n_objects; ++i) {
          const Vec3 noise = rng.gauss_vec3(sigma);
          const bool drop = rng.uniform() < cfg.drop_prob && t >= 2;
          if (drop) continue;
          ViewFrameObject obj;
          obj.id = i;
          obj.z = inst.truth[t][i] + inst.views[v].bias + noise;
          obj.r = cfg.misreport_r * sigma_eff * sigma_eff * Mat3::Identity();
          frame.objects.push_back(obj);
        }
      }
    }
    return inst;
  }
}

}  // namespace

std::vector<DataInstance> generate(const ScenarioConfig& config, int n_instances) {
  config.validate();
  if (n_instances < 0) throw InvalidConfigError("n_instances must be >= 0");
  std::vector<DataInstance> out;
  out.reserve(n_instances);
  for (int k = 0; k < n_instances; ++k) out.push_back(generate_instance(config, k));
  return out;
}

Dataset generate_dataset(const ScenarioConfig& config, int n_instances) {
  return Dataset{config, generate(config, n_instances)};
}

ObservationGraph observation_graph(const DataInstance& inst, int view_index, int frame) {
  const ViewFrame& f = inst.views.at(view_index).frames.at(frame);
  ObservationGraph g;
  g.view_id = inst.views[view_index].view_id;
  g.time_index = f.t;
  g.nodes.reserve(f.objects.size());
  for (const auto& o : f.objects) g.nodes.push_back({o.id, GaussianBelief{o.z, o.r}});
  g.edges = complete_edges(static_cast<int>(g.nodes.size()));
  return g;
}

namespace {
bool bits_equal(const Vec3& a, const Vec3& b) { return (a.array() == b.array()).all(); }
bool bits_equal(const Mat3& a, const Mat3& b) { return (a.array() == b.array()).all(); }
}  // namespace

bool operator==(const ViewFrameObject& a, const ViewFrameObject& b) {
  return a.id == b.id && bits_equal(a.z, b.z) && bits_equal(a.r, b.r);
}

bool operator==(const ViewFrame& a, const ViewFrame& b) {
  return a.t == b.t && a.objects == b.objects;
}

bool operator==(const ViewRecord& a, const ViewRecord& b) {
  return a.view_id == b.view_id && a.noise_sigma == b.noise_sigma && bits_equal(a.bias, b.bias) &&
         a.frames == b.frames;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.kind == b.kind && a.n_objects == b.n_objects && a.n_views == b.n_views &&
         a.n_frames == b.n_frames && a.dt == b.dt &&
         a.noise_sigma_per_view == b.noise_sigma_per_view &&
         a.view_bias_sigma == b.view_bias_sigma &&
         a.interaction_strength == b.interaction_strength && a.misreport_r == b.misreport_r &&
         a.drop_prob == b.drop_prob && a.seed == b.seed;
}

bool operator==(const DataInstance& a, const DataInstance& b) {
  if (a.instance_id != b.instance_id || !(a.config == b.config)) return false;
  if (a.sensors.size() != b.sensors.size() || a.truth.size() != b.truth.size()) return false;
  for (std::size_t i = 0; i < a.sensors.size(); ++i) {
    if (!bits_equal(a.sensors[i], b.sensors[i])) return false;
  }
  for (std::size_t t = 0; t < a.truth.size(); ++t) {
    if (a.truth[t].size() != b.truth[t].size()) return false;
    for (std::size_t i = 0; i < a.truth[t].size(); ++i) {
      if (!bits_equal(a.truth[t][i], b.truth[t][i])) return false;
    }
  }
  return a.views == b.views;
}

}  // namespace stgf::sim
