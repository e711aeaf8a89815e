#include "oefd/checkpoint_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oefd/errors.hpp"

namespace oefd {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("checkpoint: " + what + " is not an array");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Matrix m;
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw ParseError("checkpoint: " + what + " row is not an array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Index>(row.size()) != cols) {
      throw ParseError("checkpoint: ragged rows in " + what);
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<Real>();
  }
  if (rows == 0) m.resize(0, 0);
  if (!all_finite(m)) throw NumericalError("checkpoint: non-finite entry in " + what);
  return m;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("checkpoint: " + what + " is not an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<Real>();
  if (!all_finite(v)) throw NumericalError("checkpoint: non-finite entry in " + what);
  return v;
}

std::string activation_name(Activation a) {
  return a == Activation::rectifier ? "rectifier" : "none";
}

Activation activation_from_name(const std::string& name) {
  if (name == "rectifier") return Activation::rectifier;
  if (name == "none") return Activation::none;
  throw ParseError("checkpoint: unknown activation '" + name + "'");
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  json j;
  j["format_version"] = ckpt.format_version;
  j["mode"] = loss_mode_name(ckpt.mode);

  json enc;
  enc["widths"] = ckpt.spec.widths;
  json acts = json::array();
  for (Activation a : ckpt.spec.activations) acts.push_back(activation_name(a));
  enc["activations"] = std::move(acts);
  json layers = json::array();
  for (std::size_t l = 0; l < ckpt.model.encoder.weights.size(); ++l) {
    json layer;
    layer["weights"] = matrix_to_json(ckpt.model.encoder.weights[l]);
    layer["bias"] = vector_to_json(ckpt.model.encoder.biases[l]);
    layers.push_back(std::move(layer));
  }
  enc["layers"] = std::move(layers);
  j["encoder"] = std::move(enc);

  j["classifier_weights"] = matrix_to_json(ckpt.model.classifier.weights);
  j["age_head"] = {{"slope", ckpt.model.age_head.slope},
                   {"intercept", ckpt.model.age_head.intercept}};
  j["margin"] = {{"m", ckpt.margin.margin},
                 {"s", ckpt.margin.scale},
                 {"anneal_weight", ckpt.margin.anneal_weight},
                 {"anneal_decay", ckpt.margin.anneal_decay}};
  j["multi_task"] = {{"lambda", ckpt.multi_task.lambda}};
  j["step"] = ckpt.step;
  j["rng"] = {{"seed", ckpt.rng_seed}, {"stream", ckpt.rng_stream}, {"counter", ckpt.rng_counter}};
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("checkpoint: parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }

  try {
    const int version = j.at("format_version").get<int>();
    if (version != Checkpoint::kFormatVersion) {
      throw VersionError("checkpoint: unsupported format_version " + std::to_string(version) +
                         ", this build reads version " +
                         std::to_string(Checkpoint::kFormatVersion));
    }

    Checkpoint ckpt;
    ckpt.format_version = version;
    ckpt.mode = loss_mode_from_name(j.at("mode").get<std::string>());

    const json& enc = j.at("encoder");
    ckpt.spec.widths = enc.at("widths").get<std::vector<Index>>();
    for (const json& a : enc.at("activations")) {
      ckpt.spec.activations.push_back(activation_from_name(a.get<std::string>()));
    }
    for (const json& layer : enc.at("layers")) {
      ckpt.model.encoder.weights.push_back(matrix_from_json(layer.at("weights"), "encoder weights"));
      ckpt.model.encoder.biases.push_back(vector_from_json(layer.at("bias"), "encoder bias"));
    }
    ckpt.model.encoder.validate(ckpt.spec);

    ckpt.model.classifier.weights = matrix_from_json(j.at("classifier_weights"), "classifier");
    ckpt.model.age_head.slope = j.at("age_head").at("slope").get<Real>();
    ckpt.model.age_head.intercept = j.at("age_head").at("intercept").get<Real>();
    ckpt.margin.margin = j.at("margin").at("m").get<int>();
    ckpt.margin.scale = j.at("margin").at("s").get<Real>();
    ckpt.margin.anneal_weight = j.at("margin").at("anneal_weight").get<Real>();
    ckpt.margin.anneal_decay = j.at("margin").at("anneal_decay").get<Real>();
    ckpt.multi_task.lambda = j.at("multi_task").at("lambda").get<Real>();
    ckpt.step = j.at("step").get<std::int64_t>();
    ckpt.rng_seed = j.at("rng").at("seed").get<std::uint64_t>();
    ckpt.rng_stream = j.at("rng").at("stream").get<std::uint64_t>();
    ckpt.rng_counter = j.at("rng").at("counter").get<std::uint64_t>();
    ckpt.margin.validate();
    ckpt.multi_task.validate();
    return ckpt;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: malformed document: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("checkpoint: cannot open '" + path.string() + "' for writing");
  out << checkpoint_to_string(ckpt);
  if (!out) throw IoError("checkpoint: write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace oefd
