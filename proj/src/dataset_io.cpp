#include "stgf/sim/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stgf::sim {

namespace {

using nlohmann::json;

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j, int line) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(line, "expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json mat3_to_json(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  }
  return a;
}

Mat3 mat3_from_json(const json& j, int line) {
  if (!j.is_array() || j.size() != 9) throw SchemaError(line, "expected a 9-element row-major array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
  }
  return m;
}

json config_to_json(const ScenarioConfig& c) {
  return json{{"kind", to_string(c.kind)},
              {"n_objects", c.n_objects},
              {"n_views", c.n_views},
              {"n_frames", c.n_frames},
              {"dt", c.dt},
              {"noise_sigma_per_view", c.noise_sigma_per_view},
              {"view_bias_sigma", c.view_bias_sigma},
              {"interaction_strength", c.interaction_strength},
              {"misreport_r", c.misreport_r},
              {"drop_prob", c.drop_prob},
              {"seed", c.seed}};
}

template <typename T>
T field(const json& j, const char* key, int line) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(line, std::string("missing field \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(line, std::string("field \"") + key + "\" has the wrong type");
  }
}

ScenarioConfig config_from_json(const json& j, int line) {
  ScenarioConfig c;
  c.kind = kind_from_string(field<std::string>(j, "kind", line));
  c.n_objects = field<int>(j, "n_objects", line);
  c.n_views = field<int>(j, "n_views", line);
  c.n_frames = field<int>(j, "n_frames", line);
  c.dt = field<double>(j, "dt", line);
  c.noise_sigma_per_view = field<std::vector<double>>(j, "noise_sigma_per_view", line);
  c.view_bias_sigma = field<double>(j, "view_bias_sigma", line);
  c.interaction_strength = field<double>(j, "interaction_strength", line);
  c.misreport_r = field<double>(j, "misreport_r", line);
  c.drop_prob = field<double>(j, "drop_prob", line);
  c.seed = field<std::uint64_t>(j, "seed", line);
  return c;
}

json instance_to_json(const DataInstance& inst) {
  json sensors = json::array();
  for (const auto& s : inst.sensors) sensors.push_back(vec3_to_json(s));
  json truth = json::array();
  for (const auto& frame : inst.truth) {
    json per_object = json::array();
    for (const auto& p : frame) per_object.push_back(vec3_to_json(p));
    truth.push_back(per_object);
  }
  json views = json::array();
  for (const auto& view : inst.views) {
    json frames = json::array();
    for (const auto& f : view.frames) {
      json objects = json::array();
      for (const auto& o : f.objects) {
        objects.push_back(json{{"id", o.id}, {"z", vec3_to_json(o.z)}, {"r", mat3_to_json(o.r)}});
      }
      frames.push_back(json{{"t", f.t}, {"objects", objects}});
    }
    views.push_back(json{{"view_id", view.view_id},
                         {"noise_sigma", view.noise_sigma},
                         {"bias", vec3_to_json(view.bias)},
                         {"frames", frames}});
  }
  return json{{"instance_id", inst.instance_id},
              {"sensors", sensors},
              {"truth", truth},
              {"views", views}};
}

DataInstance instance_from_json(const json& j, const ScenarioConfig& config, int line) {
  DataInstance inst;
  inst.config = config;
  inst.instance_id = field<int>(j, "instance_id", line);
  for (const auto& s : field<json>(j, "sensors", line)) inst.sensors.push_back(vec3_from_json(s, line));
  for (const auto& frame : field<json>(j, "truth", line)) {
    std::vector<Vec3> per_object;
    for (const auto& p : frame) per_object.push_back(vec3_from_json(p, line));
    inst.truth.push_back(std::move(per_object));
  }
  for (const auto& vj : field<json>(j, "views", line)) {
    ViewRecord view;
    view.view_id = field<int>(vj, "view_id", line);
    view.noise_sigma = field<double>(vj, "noise_sigma", line);
    view.bias = vec3_from_json(field<json>(vj, "bias", line), line);
    for (const auto& fj : field<json>(vj, "frames", line)) {
      ViewFrame frame;
      frame.t = field<int>(fj, "t", line);
      for (const auto& oj : field<json>(fj, "objects", line)) {
        ViewFrameObject obj;
        obj.id = field<int>(oj, "id", line);
        obj.z = vec3_from_json(field<json>(oj, "z", line), line);
        obj.r = mat3_from_json(field<json>(oj, "r", line), line);
        frame.objects.push_back(obj);
      }
      view.frames.push_back(std::move(frame));
    }
    inst.views.push_back(std::move(view));
  }
  return inst;
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  json header{{"format_version", 1},
              {"kind", to_string(dataset.config.kind)},
              {"config", config_to_json(dataset.config)}};
  out << header.dump() << '\n';
  for (const auto& inst : dataset.instances) out << instance_to_json(inst).dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);

  Dataset dataset;
  std::string line;
  int line_number = 0;

  if (!std::getline(in, line)) throw SchemaError(1, "missing header line");
  ++line_number;
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded()) throw SchemaError(1, "header is not valid JSON");
  const int version = field<int>(header, "format_version", 1);
  if (version != 1)
    throw FormatVersionMismatchError("unsupported format_version " + std::to_string(version));
  dataset.config = config_from_json(field<json>(header, "config", 1), 1);

  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError(line_number, "instance line is not valid JSON");
    dataset.instances.push_back(instance_from_json(j, dataset.config, line_number));
  }
  return dataset;
}

}  // namespace stgf::sim
