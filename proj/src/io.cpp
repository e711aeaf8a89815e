#include "oefd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "oefd/errors.hpp"

namespace oefd {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(what + ": cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text,
                const std::string& what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(what + ": cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError(what + ": write failed for '" + path.string() + "'");
}

[[noreturn]] void parse_fail(const std::string& what, std::size_t line, const std::string& msg) {
  throw ParseError(what + ": line " + std::to_string(line) + ": " + msg);
}

Real parse_real(std::string_view token, const std::string& what, std::size_t line) {
  Real value = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    parse_fail(what, line, "bad number '" + std::string(token) + "'");
  }
  return value;
}

long parse_long(std::string_view token, const std::string& what, std::size_t line) {
  long value = 0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    parse_fail(what, line, "bad integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_view(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(text.substr(pos));
      return out;
    }
    out.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
}

// Iterates non-empty lines, tracking 1-based line numbers for error messages.
struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 0;

  bool next(std::string_view& out) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view l = text.substr(pos, end - pos);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      pos = end + 1;
      ++line;
      if (!l.empty()) {
        out = l;
        return true;
      }
    }
    return false;
  }
};

Vector parse_components(std::string_view csv, const std::string& what, std::size_t line) {
  const std::vector<std::string_view> tokens = split_view(csv, ',');
  Vector v(static_cast<Index>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    v[static_cast<Index>(i)] = parse_real(tokens[i], what, line);
  }
  return v;
}

}  // namespace

std::string fmt_real(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  ds.validate();
  std::string text = "# oefd-dataset v1\n";
  for (Index i = 0; i < ds.size(); ++i) {
    text += std::to_string(ds.identity_labels[static_cast<std::size_t>(i)]);
    text += ',';
    text += fmt_real(ds.age_labels[i]);
    text += '\t';
    for (Index c = 0; c < ds.inputs.cols(); ++c) {
      if (c > 0) text += ',';
      text += fmt_real(ds.inputs(i, c));
    }
    text += '\n';
  }
  write_file(path, text, "dataset");
}

Dataset read_dataset(const std::filesystem::path& path) {
  const std::string text = read_file(path, "dataset");
  LineReader reader{text};
  std::string_view header;
  if (!reader.next(header) || header != "# oefd-dataset v1") {
    parse_fail("dataset", 1, "missing '# oefd-dataset v1' header");
  }

  std::vector<int> identities;
  std::vector<Real> ages;
  std::vector<Vector> rows;
  std::string_view line;
  while (reader.next(line)) {
    const std::vector<std::string_view> halves = split_view(line, '\t');
    if (halves.size() != 2) parse_fail("dataset", reader.line, "expected a single tab separator");
    const std::vector<std::string_view> meta = split_view(halves[0], ',');
    if (meta.size() != 2) parse_fail("dataset", reader.line, "expected 'identity,age' before tab");
    identities.push_back(static_cast<int>(parse_long(meta[0], "dataset", reader.line)));
    ages.push_back(parse_real(meta[1], "dataset", reader.line));
    rows.push_back(parse_components(halves[1], "dataset", reader.line));
    if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
      parse_fail("dataset", reader.line, "inconsistent component count");
    }
  }

  Dataset ds;
  ds.identity_labels = std::move(identities);
  ds.age_labels.resize(static_cast<Index>(ages.size()));
  for (std::size_t i = 0; i < ages.size(); ++i) ds.age_labels[static_cast<Index>(i)] = ages[i];
  ds.inputs.resize(static_cast<Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.inputs.row(static_cast<Index>(i)) = rows[i].transpose();
  }
  int max_id = -1;
  for (int id : ds.identity_labels) max_id = std::max(max_id, id);
  ds.num_identities = max_id + 1;
  ds.validate();
  return ds;
}

void write_pairs(const std::filesystem::path& path, const std::vector<Pair>& pairs) {
  std::string text;
  for (const Pair& p : pairs) {
    text += std::to_string(p.a);
    text += ',';
    text += std::to_string(p.b);
    text += ',';
    text += std::to_string(p.label);
    text += '\n';
  }
  write_file(path, text, "pairs");
}

std::vector<Pair> read_pairs(const std::filesystem::path& path) {
  const std::string text = read_file(path, "pairs");
  LineReader reader{text};
  std::vector<Pair> pairs;
  std::string_view line;
  while (reader.next(line)) {
    const std::vector<std::string_view> tokens = split_view(line, ',');
    if (tokens.size() != 3) parse_fail("pairs", reader.line, "expected 'index_a,index_b,label'");
    Pair p;
    p.a = parse_long(tokens[0], "pairs", reader.line);
    p.b = parse_long(tokens[1], "pairs", reader.line);
    p.label = static_cast<int>(parse_long(tokens[2], "pairs", reader.line));
    if (p.label != 0 && p.label != 1) parse_fail("pairs", reader.line, "label must be 0 or 1");
    if (p.a < 0 || p.b < 0) parse_fail("pairs", reader.line, "negative index");
    pairs.push_back(p);
  }
  return pairs;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
  set.validate("embeddings");
  std::string text = "# oefd-embeddings v1\n";
  for (Index i = 0; i < set.size(); ++i) {
    text += std::to_string(set.identities[static_cast<std::size_t>(i)]);
    text += '\t';
    for (Index c = 0; c < set.embeddings.cols(); ++c) {
      if (c > 0) text += ',';
      text += fmt_real(set.embeddings(i, c));
    }
    text += '\n';
  }
  write_file(path, text, "embeddings");
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  const std::string text = read_file(path, "embeddings");
  LineReader reader{text};
  std::string_view header;
  if (!reader.next(header) || header != "# oefd-embeddings v1") {
    parse_fail("embeddings", 1, "missing '# oefd-embeddings v1' header");
  }

  std::vector<int> identities;
  std::vector<Vector> rows;
  std::string_view line;
  while (reader.next(line)) {
    const std::vector<std::string_view> halves = split_view(line, '\t');
    if (halves.size() != 2) parse_fail("embeddings", reader.line, "expected a single tab separator");
    identities.push_back(static_cast<int>(parse_long(halves[0], "embeddings", reader.line)));
    if (identities.back() < -1) {
      parse_fail("embeddings", reader.line, "identity must be >= -1");
    }
    rows.push_back(parse_components(halves[1], "embeddings", reader.line));
    if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
      parse_fail("embeddings", reader.line, "inconsistent component count");
    }
  }

  EmbeddingSet set;
  set.identities = std::move(identities);
  set.embeddings.resize(static_cast<Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    set.embeddings.row(static_cast<Index>(i)) = rows[i].transpose();
  }
  return set;
}

void write_decomposed(const std::filesystem::path& path, const EmbeddingSet& set) {
  set.validate("decomposed");
  std::string text = "# oefd-decomposed v1\n";
  for (Index i = 0; i < set.size(); ++i) {
    const Real norm = set.embeddings.row(i).norm();
    text += std::to_string(set.identities[static_cast<std::size_t>(i)]);
    text += ',';
    text += fmt_real(set.ages.size() > 0 ? set.ages[i] : 0.0);
    text += ',';
    text += fmt_real(norm);
    text += '\t';
    const Real denom = std::max(norm, 1e-12);
    for (Index c = 0; c < set.embeddings.cols(); ++c) {
      if (c > 0) text += ',';
      text += fmt_real(set.embeddings(i, c) / denom);
    }
    text += '\n';
  }
  write_file(path, text, "decomposed");
}

void write_split(const std::filesystem::path& path, const CrossAgeSplit& split) {
  json j;
  j["format_version"] = 1;
  j["test_identities"] = split.test_identities;
  j["train"] = split.train_indices;
  j["gallery"] = split.gallery_indices;
  j["probe"] = split.probe_indices;
  j["age_range"] = {split.age_lo, split.age_hi};
  write_file(path, j.dump(2) + "\n", "split");
}

CrossAgeSplit read_split(const std::filesystem::path& path) {
  const std::string text = read_file(path, "split");
  try {
    const json j = json::parse(text);
    CrossAgeSplit split;
    split.test_identities = j.at("test_identities").get<std::vector<int>>();
    split.train_indices = j.at("train").get<std::vector<Index>>();
    split.gallery_indices = j.at("gallery").get<std::vector<Index>>();
    split.probe_indices = j.at("probe").get<std::vector<Index>>();
    split.age_lo = j.at("age_range").at(0).get<Real>();
    split.age_hi = j.at("age_range").at(1).get<Real>();
    return split;
  } catch (const json::parse_error& e) {
    throw ParseError("split: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  } catch (const json::exception& e) {
    throw ParseError(std::string("split: malformed document: ") + e.what());
  }
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
  json j;
  j["protocol"] = report.protocol;
  j["metrics"] = report.metrics;
  j["counts"] = report.counts;
  j["config"] = report.config;
  write_file(path, j.dump(2) + "\n", "report");
}

std::string metrics_to_csv(const std::vector<EpochMetrics>& metrics) {
  std::string text = "epoch,lr,total_loss,id_loss,age_loss,train_accuracy\n";
  for (const EpochMetrics& m : metrics) {
    text += std::to_string(m.epoch);
    text += ',';
    text += fmt_real(m.lr);
    text += ',';
    text += fmt_real(m.total_loss);
    text += ',';
    text += fmt_real(m.id_loss);
    text += ',';
    text += fmt_real(m.age_loss);
    text += ',';
    text += fmt_real(m.train_accuracy);
    text += '\n';
  }
  return text;
}

void write_metrics(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics) {
  write_file(path, metrics_to_csv(metrics), "metrics");
}

}  // namespace oefd
