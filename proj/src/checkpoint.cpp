#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imin/errors.hpp"
#include "imin/surrogate.hpp"

namespace imin {

namespace {

using nlohmann::json;

template <typename Mat>
json tensor(const Mat& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

template <typename Mat>
void read_tensor(const json& tensors, const std::string& name, Mat& m) {
  if (!tensors.contains(name)) throw CorruptFile("checkpoint is missing tensor '" + name + "'");
  const auto& t = tensors.at(name);
  const auto rows = t.at("rows").get<Eigen::Index>();
  const auto cols = t.at("cols").get<Eigen::Index>();
  const auto& data = t.at("data");
  if (rows != m.rows() || cols != m.cols() || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw CorruptFile("tensor '" + name + "' has unexpected dimensions");
  }
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data.at(k++).get<double>();
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

json parse_or_corrupt(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw CorruptFile("'" + path + "' is not a valid document: " + e.what());
  }
}

}  // namespace

void save_model(const SurrogateModel& model, const std::string& path) {
  json tensors = json::object();
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    tensors[p + "w_self"] = tensor(model.layers[l].w_self);
    tensors[p + "w_nbr"] = tensor(model.layers[l].w_nbr);
    tensors[p + "bias"] = tensor(model.layers[l].bias);
  }
  tensors["head.w"] = tensor(model.head_w);
  Eigen::Matrix<double, 1, 1> hb;
  hb(0, 0) = model.head_b;
  tensors["head.b"] = tensor(hb);
  json doc{{"format", "imin-surrogate"},
           {"version", kCheckpointVersion},
           {"layer_count", model.layer_count()},
           {"hidden_dim", model.hidden_dim()},
           {"train_graph_hash", model.train_graph_hash},
           {"diffusion", model.diffusion},
           {"tensors", std::move(tensors)}};
  spit(path, doc.dump(1) + "\n");
}

SurrogateModel load_model(const std::string& path) {
  const json doc = parse_or_corrupt(slurp(path), path);
  try {
    if (!doc.is_object() || doc.value("format", "") != "imin-surrogate") {
      throw CorruptFile("'" + path + "' is not a surrogate checkpoint");
    }
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw VersionMismatch("checkpoint version " + std::to_string(version) + ", expected " +
                            std::to_string(kCheckpointVersion));
    }
    const auto layer_count = doc.at("layer_count").get<std::size_t>();
    const auto hidden = doc.at("hidden_dim").get<std::size_t>();
    const auto& tensors = doc.at("tensors");
    std::size_t stored_layers = 0;
    while (tensors.contains("layer" + std::to_string(stored_layers) + ".w_self")) ++stored_layers;
    if (stored_layers != layer_count) {
      throw VersionMismatch("checkpoint declares " + std::to_string(layer_count) + " layers but stores " +
                            std::to_string(stored_layers));
    }
    auto model = SurrogateModel::zeros(layer_count, hidden);
    for (std::size_t l = 0; l < layer_count; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      read_tensor(tensors, p + "w_self", model.layers[l].w_self);
      read_tensor(tensors, p + "w_nbr", model.layers[l].w_nbr);
      read_tensor(tensors, p + "bias", model.layers[l].bias);
    }
    read_tensor(tensors, "head.w", model.head_w);
    Eigen::Matrix<double, 1, 1> hb;
    read_tensor(tensors, "head.b", hb);
    model.head_b = hb(0, 0);
    model.train_graph_hash = doc.value("train_graph_hash", "");
    model.diffusion = doc.value("diffusion", "");
    return model;
  } catch (const json::exception& e) {
    throw CorruptFile("'" + path + "' has a malformed field: " + e.what());
  } catch (const PreconditionError& e) {
    throw CorruptFile("'" + path + "': " + e.what());
  }
}

void save_targets(const std::vector<std::vector<double>>& targets, const std::string& graph_hash,
                  const std::string& path) {
  json sets = json::object();
  for (std::size_t i = 0; i < targets.size(); ++i) sets[std::to_string(i)] = targets[i];
  json doc{{"format", "imin-targets"}, {"version", 1}, {"graph_hash", graph_hash}, {"targets", std::move(sets)}};
  spit(path, doc.dump() + "\n");
}

std::vector<std::vector<double>> load_targets(const std::string& path, const std::string& graph_hash) {
  const json doc = parse_or_corrupt(slurp(path), path);
  try {
    if (doc.value("format", "") != "imin-targets") throw CorruptFile("'" + path + "' is not a target cache");
    if (doc.at("graph_hash").get<std::string>() != graph_hash) {
      throw VersionMismatch("target cache '" + path + "' was built for a different graph");
    }
    const auto& sets = doc.at("targets");
    std::vector<std::vector<double>> out(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) out[i] = sets.at(std::to_string(i)).get<std::vector<double>>();
    return out;
  } catch (const json::exception& e) {
    throw CorruptFile("'" + path + "' has a malformed field: " + e.what());
  }
}

}  // namespace imin
