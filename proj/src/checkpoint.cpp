#include "eacl/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "eacl/config.hpp"
#include "eacl/errors.hpp"

namespace eacl {

namespace {

using nlohmann::json;

constexpr int kCheckpointVersion = 1;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = m.rows == 0 ? 0 : rows.at(0).size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& row : rows) {
    if (row.size() != m.cols) throw DataError("checkpoint: ragged matrix rows");
    for (const auto& x : row) m.data.push_back(x.get<double>());
  }
  return m;
}

json mlp_to_json(const MlpParams& params) {
  json layers = json::array();
  for (const auto& layer : params.layers) {
    layers.push_back({{"w", matrix_to_json(layer.w)}, {"b", layer.b}});
  }
  return layers;
}

MlpParams mlp_from_json(const json& layers) {
  MlpParams params;
  for (const auto& layer : layers) {
    AffineLayer l;
    l.w = matrix_from_json(layer.at("w"));
    l.b = layer.at("b").get<Vector>();
    params.layers.push_back(std::move(l));
  }
  if (params.layers.empty()) throw DataError("checkpoint: empty parameter stack");
  return params;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json doc;
  doc["format"] = "eacl-checkpoint";
  doc["version"] = kCheckpointVersion;
  doc["stage"] = ckpt.state.stage == Stage::one ? "one" : "two";
  doc["config_hash"] = ckpt.meta.config_hash;
  doc["f"] = ckpt.state.feature_dim;
  doc["d"] = ckpt.state.hidden_dim;
  doc["s"] = ckpt.state.class_count;
  doc["k"] = ckpt.meta.k;
  doc["feature_seed"] = ckpt.meta.feature_seed;
  doc["labels"] = ckpt.meta.label_texts;
  doc["supcon_variant"] = to_string(ckpt.meta.supcon_variant);
  doc["encoder"] = mlp_to_json(ckpt.state.encoder);
  doc["proj_cl"] = mlp_to_json(ckpt.state.proj_cl);
  doc["head_ce"] = mlp_to_json(ckpt.state.head_ce);
  doc["anchor_hidden"] = matrix_to_json(ckpt.state.anchor_hidden);
  // The persisted anchors are always the live ones.
  doc["anchors"] = matrix_to_json(current_anchors(ckpt.state));

  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << doc.dump(1) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("checkpoint parse error in " + path + ": " + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "eacl-checkpoint") {
      throw DataError("not a checkpoint file: " + path);
    }
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version in " + path);
    }
    Checkpoint ckpt;
    std::string stage = doc.at("stage").get<std::string>();
    if (stage == "one") ckpt.state.stage = Stage::one;
    else if (stage == "two") ckpt.state.stage = Stage::two;
    else throw DataError("checkpoint: unknown stage tag \"" + stage + "\"");

    ckpt.state.feature_dim = doc.at("f").get<std::size_t>();
    ckpt.state.hidden_dim = doc.at("d").get<std::size_t>();
    ckpt.state.class_count = doc.at("s").get<std::size_t>();
    ckpt.meta.k = doc.at("k").get<std::size_t>();
    ckpt.meta.feature_seed = doc.at("feature_seed").get<std::uint64_t>();
    ckpt.meta.config_hash = doc.at("config_hash").get<std::string>();
    ckpt.meta.label_texts = doc.at("labels").get<std::vector<std::string>>();
    ckpt.meta.supcon_variant = supcon_variant_from_string(doc.at("supcon_variant").get<std::string>());
    ckpt.state.encoder = mlp_from_json(doc.at("encoder"));
    ckpt.state.proj_cl = mlp_from_json(doc.at("proj_cl"));
    ckpt.state.head_ce = mlp_from_json(doc.at("head_ce"));
    ckpt.state.anchor_hidden = matrix_from_json(doc.at("anchor_hidden"));
    ckpt.state.anchors = matrix_from_json(doc.at("anchors"));

    if (ckpt.meta.label_texts.size() != ckpt.state.class_count) {
      throw DataError("checkpoint: label list does not match class count");
    }
    if (ckpt.state.encoder.in_dim() != ckpt.state.feature_dim ||
        ckpt.state.encoder.out_dim() != ckpt.state.hidden_dim) {
      throw DataError("checkpoint: encoder shape does not match declared dimensions");
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError("checkpoint schema error in " + path + ": " + e.what());
  }
}

}  // namespace eacl
