#include "stgf/stgnn/model.hpp"

#include <fstream>
#include <vector>

#include <json.hpp>

#include "stgf/core/rng.hpp"

namespace stgf::stgnn {

namespace {

using nlohmann::json;

ModelParams shaped() {
  ModelParams p;
  p.encoder.w_ih = Tensor::Zero(kInputDim, kGateDim);
  p.encoder.w_hh = Tensor::Zero(kHiddenDim, kGateDim);
  p.encoder.b = Tensor::Zero(1, kGateDim);
  p.gat1.w = Tensor::Zero(kHiddenDim, kGat1Dim);
  p.gat1.a = Tensor::Zero(1, 2 * kGat1Dim);
  p.gat2.w = Tensor::Zero(kGat1Dim, kHiddenDim);
  p.gat2.a = Tensor::Zero(1, 2 * kHiddenDim);
  p.decoder_init = Tensor::Zero(kEmbedDim, kHiddenDim);
  p.decoder.w_ih = Tensor::Zero(kInputDim, kGateDim);
  p.decoder.w_hh = Tensor::Zero(kHiddenDim, kGateDim);
  p.decoder.b = Tensor::Zero(1, kGateDim);
  p.out_w = Tensor::Zero(kHiddenDim, kInputDim);
  p.out_b = Tensor::Zero(1, kInputDim);
  return p;
}

/// 1-D tensors (biases, attention vectors) are serialized with shape [n].
bool is_vector_tensor(const std::string& name) {
  return name == "enc.b" || name == "dec.b" || name == "gat1.a" || name == "gat2.a" ||
         name == "out.b";
}

}  // namespace

ModelParams ModelParams::zeros() { return shaped(); }

ModelParams ModelParams::seeded(std::uint64_t seed) {
  ModelParams p = shaped();
  Rng rng(seed);
  for_each_tensor(p, [&rng](const char*, Tensor& t) {
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = rng.uniform(-0.1, 0.1);
    }
  });
  return p;
}

bool same_values(const ModelParams& a, const ModelParams& b) {
  std::vector<const Tensor*> ta, tb;
  for_each_tensor(a, [&](const char*, const Tensor& t) { ta.push_back(&t); });
  for_each_tensor(b, [&](const char*, const Tensor& t) { tb.push_back(&t); });
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i]->rows() != tb[i]->rows() || ta[i]->cols() != tb[i]->cols()) return false;
    if (!(ta[i]->array() == tb[i]->array()).all()) return false;
  }
  return true;
}

void save_model(const ModelParams& params, std::uint64_t seed, const std::string& path) {
  json tensors = json::object();
  for_each_tensor(params, [&](const char* name, const Tensor& t) {
    json shape = is_vector_tensor(name) ? json::array({t.size()})
                                        : json::array({t.rows(), t.cols()});
    json data = json::array();
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) data.push_back(t(r, c));
    }
    tensors[name] = json{{"shape", shape}, {"data", data}};
  });
  json doc{{"format_version", 1}, {"hidden_dim", kHiddenDim}, {"seed", seed}, {"tensors", tensors}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw SchemaError(1, "model file is not valid JSON");

  if (!doc.contains("format_version")) throw SchemaError(1, "missing field \"format_version\"");
  const int version = doc["format_version"].get<int>();
  if (version != 1)
    throw FormatVersionMismatchError("unsupported format_version " + std::to_string(version));
  if (!doc.contains("tensors")) throw SchemaError(1, "missing field \"tensors\"");
  if (doc.value("hidden_dim", 0) != kHiddenDim) throw SchemaError(1, "unexpected hidden_dim");

  LoadedModel loaded;
  loaded.seed = doc.value("seed", std::uint64_t{0});
  loaded.params = shaped();
  const json& tensors = doc["tensors"];
  for_each_tensor(loaded.params, [&](const char* name, Tensor& t) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw SchemaError(1, std::string("missing tensor \"") + name + "\"");
    const json& shape = (*it)["shape"];
    const json& data = (*it)["data"];
    const bool vector_shape = is_vector_tensor(name);
    if (vector_shape) {
      if (shape.size() != 1 || shape[0].get<Eigen::Index>() != t.size())
        throw SchemaError(1, std::string("tensor \"") + name + "\" has the wrong shape");
    } else {
      if (shape.size() != 2 || shape[0].get<Eigen::Index>() != t.rows() ||
          shape[1].get<Eigen::Index>() != t.cols())
        throw SchemaError(1, std::string("tensor \"") + name + "\" has the wrong shape");
    }
    if (static_cast<Eigen::Index>(data.size()) != t.size())
      throw SchemaError(1, std::string("tensor \"") + name + "\" has the wrong element count");
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = data[k++].get<double>();
    }
  });
  return loaded;
}

}  // namespace stgf::stgnn
