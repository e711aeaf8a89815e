// oefd: batch front end for the orthogonal embedding decomposition toolkit.
// Subcommands: gen-data, train, embed, eval, toy-fig3, grad-check.
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numerical error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oefd/checkpoint_io.hpp"
#include "oefd/datagen.hpp"
#include "oefd/eval.hpp"
#include "oefd/gradcheck.hpp"
#include "oefd/io.hpp"
#include "oefd/presets.hpp"
#include "oefd/trainer.hpp"

namespace fs = std::filesystem;
using namespace oefd;

namespace {

// ---------------------------------------------------------------------------
// Config handling: flat key=value files, overridden by --set flags and the
// common --seed/--out shortcuts. Every command consumes its keys through a
// Settings view; leftovers are rejected by name.
// ---------------------------------------------------------------------------

class Settings {
 public:
  void load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open '" + path.string() + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ParseError("config: line " + std::to_string(lineno) + ": expected key=value");
      }
      values_[trim(trimmed.substr(0, eq))] = trim(trimmed.substr(eq + 1));
    }
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  void apply_overrides(const std::vector<std::string>& overrides) {
    for (const std::string& kv : overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      }
      set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
  }

  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  std::string take_string(const std::string& key, const std::string& fallback) {
    return take(key).value_or(fallback);
  }

  std::string take_required(const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return *v;
  }

  Real take_real(const std::string& key, Real fallback) {
    const auto v = take(key);
    return v ? parse_real(key, *v) : fallback;
  }

  long take_long(const std::string& key, long fallback) {
    const auto v = take(key);
    return v ? parse_long(key, *v) : fallback;
  }

  std::uint64_t take_u64(const std::string& key, std::uint64_t fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const std::uint64_t value = std::stoull(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return value;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + *v + "'");
    }
  }

  bool take_bool(const std::string& key, bool fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + *v + "'");
  }

  // "a,b,c" as integers; an empty value means an empty list.
  std::vector<Index> take_index_list(const std::string& key) {
    const auto v = take(key);
    std::vector<Index> out;
    if (!v || v->empty()) return out;
    std::stringstream ss(*v);
    std::string token;
    while (std::getline(ss, token, ',')) out.push_back(parse_long(key, trim(token)));
    return out;
  }

  // "lo,hi" real pair.
  std::optional<std::pair<Real, Real>> take_real_pair(const std::string& key) {
    const auto v = take(key);
    if (!v) return std::nullopt;
    const std::size_t comma = v->find(',');
    if (comma == std::string::npos) {
      throw ConfigError("key '" + key + "': expected 'lo,hi', got '" + *v + "'");
    }
    return std::make_pair(parse_real(key, trim(v->substr(0, comma))),
                          parse_real(key, trim(v->substr(comma + 1))));
  }

  void reject_unknown(const std::string& command) const {
    if (values_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : values_) {
      if (!keys.empty()) keys += ", ";
      keys += "'" + k + "'";
    }
    throw ConfigError(command + ": unknown config key(s): " + keys);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
  }

  static Real parse_real(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const Real value = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return value;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
  }

  static long parse_long(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const long value = std::stol(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return value;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key=value config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "seed override")->each([&args](const std::string&) {
    args.seed_given = true;
  });
  cmd->add_option("--set", args.overrides, "override a config key, key=value (repeatable)");
}

Settings gather_settings(const CommonArgs& args) {
  Settings settings;
  if (!args.config_path.empty()) settings.load_file(args.config_path);
  settings.apply_overrides(args.overrides);
  if (args.seed_given) settings.set("seed", std::to_string(args.seed));
  if (!args.out_dir.empty()) settings.set("out", args.out_dir);
  return settings;
}

fs::path prepare_out_dir(Settings& settings) {
  const fs::path dir = settings.take_string("out", "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

SyntheticSpec synthetic_spec_from(Settings& settings) {
  SyntheticSpec spec = crossage_synthetic_spec(1);
  spec.num_identities = settings.take_long("num_identities", spec.num_identities);
  spec.input_dim = settings.take_long("input_dim", spec.input_dim);
  spec.samples_per_identity =
      settings.take_long("samples_per_identity", spec.samples_per_identity);
  if (const auto range = settings.take_real_pair("age_range")) {
    spec.age_min = range->first;
    spec.age_max = range->second;
  }
  spec.age_effect = settings.take_real("age_effect", spec.age_effect);
  spec.noise_sigma = settings.take_real("noise_sigma", spec.noise_sigma);
  spec.seed = settings.take_u64("seed", spec.seed);
  return spec;
}

// ---------------------------------------------------------------------------
// gen-data
// ---------------------------------------------------------------------------

int cmd_gen_data(const CommonArgs& args) {
  Settings settings = gather_settings(args);
  const fs::path out = prepare_out_dir(settings);
  const SyntheticSpec spec = synthetic_spec_from(settings);
  const Real test_fraction = settings.take_real("test_fraction", kCrossAgeTestFraction);
  const long num_positive = settings.take_long("num_positive_pairs", 200);
  const long num_negative = settings.take_long("num_negative_pairs", 200);
  settings.reject_unknown("gen-data");
  spec.validate();

  const std::vector<SyntheticSample> samples = generate(spec);
  const Dataset dataset = to_dataset(samples, spec.num_identities);
  const CrossAgeSplit split = make_cross_age_split(samples, test_fraction, spec.seed);
  const std::vector<Pair> pairs = make_pairs(samples, num_positive, num_negative, spec.seed);

  // Per-role dataset files so the split is directly trainable/evaluable:
  // train identities renumbered contiguously, gallery/probe keep originals.
  write_dataset(out / "dataset.tsv", dataset);
  write_dataset(out / "train.tsv", subset_dataset(samples, split.train_indices, true));
  write_dataset(out / "gallery.tsv", subset_dataset(samples, split.gallery_indices, false));
  write_dataset(out / "probe.tsv", subset_dataset(samples, split.probe_indices, false));
  write_split(out / "split.json", split);
  write_pairs(out / "pairs.csv", pairs);

  std::cout << "samples: " << samples.size() << "\n"
            << "train samples: " << split.train_indices.size() << "\n"
            << "gallery: " << split.gallery_indices.size() << "\n"
            << "probe: " << split.probe_indices.size() << "\n"
            << "pairs: " << pairs.size() << "\n"
            << "wrote dataset.tsv, train.tsv, gallery.tsv, probe.tsv, split.json, pairs.csv in "
            << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

TrainConfig train_config_from(Settings& settings, LossMode mode) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.batch_size = settings.take_long("batch_size", cfg.batch_size);
  cfg.epochs = settings.take_long("epochs", cfg.epochs);
  cfg.learning_rate = settings.take_real("learning_rate", cfg.learning_rate);
  cfg.lr_drop_epochs = settings.take_index_list("lr_drop_epochs");
  cfg.lr_drop_factor = settings.take_real("lr_drop_factor", cfg.lr_drop_factor);
  cfg.momentum = settings.take_real("momentum", cfg.momentum);
  cfg.seed = settings.take_u64("seed", cfg.seed);
  cfg.margin.margin = static_cast<int>(settings.take_long("m", cfg.margin.margin));
  cfg.margin.scale = settings.take_real("s", cfg.margin.scale);
  cfg.margin.anneal_weight = settings.take_real("anneal_weight", cfg.margin.anneal_weight);
  if (const auto decay = settings.take("anneal_decay"); decay && *decay != "auto") {
    try {
      cfg.margin.anneal_decay = std::stod(*decay);
    } catch (const std::exception&) {
      throw ConfigError("key 'anneal_decay': expected a number or 'auto', got '" + *decay + "'");
    }
    cfg.anneal_decay_auto = false;
  }
  cfg.multi_task.lambda = settings.take_real("lambda", cfg.multi_task.lambda);
  cfg.freeze_age_head = settings.take_bool("freeze_age_head", cfg.freeze_age_head);
  cfg.age_backprop_to_encoder = settings.take_bool("age_backprop", cfg.age_backprop_to_encoder);
  return cfg;
}

EncoderSpec encoder_spec_from(Settings& settings, Index input_dim) {
  std::vector<Index> widths = {input_dim};
  const std::string hidden = settings.take_string("hidden", "32");
  if (!hidden.empty()) {
    std::stringstream ss(hidden);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        std::size_t used = 0;
        widths.push_back(std::stol(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ConfigError("key 'hidden': expected comma-separated widths, got '" + hidden + "'");
      }
    }
  }
  widths.push_back(settings.take_long("embedding_dim", 8));
  return EncoderSpec::mlp(std::move(widths));
}

int cmd_train(const CommonArgs& args) {
  Settings settings = gather_settings(args);
  const fs::path out = prepare_out_dir(settings);
  const fs::path dataset_path = settings.take_required("dataset");
  const LossMode mode = loss_mode_from_name(settings.take_string("mode", "oe"));
  TrainConfig cfg = train_config_from(settings, mode);

  const Dataset dataset = read_dataset(dataset_path);
  const EncoderSpec spec = encoder_spec_from(settings, dataset.inputs.cols());
  settings.reject_unknown("train");
  cfg.validate();
  spec.validate();

  const TrainResult result = train(dataset, spec, cfg);
  save_checkpoint(result.checkpoint, out / "checkpoint.json");
  write_metrics(out / "metrics.csv", result.metrics);

  std::cout << "mode: " << loss_mode_name(mode) << "\n"
            << "epochs: " << result.metrics.size() << "\n";
  if (!result.metrics.empty()) {
    const EpochMetrics& last = result.metrics.back();
    std::cout << "final total_loss: " << fmt_real(last.total_loss) << "\n"
              << "final train_accuracy: " << fmt_real(last.train_accuracy) << "\n";
  }
  std::cout << "wrote " << (out / "checkpoint.json").string() << ", "
            << (out / "metrics.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// embed
// ---------------------------------------------------------------------------

int cmd_embed(const CommonArgs& args) {
  Settings settings = gather_settings(args);
  const fs::path out = prepare_out_dir(settings);
  const fs::path ckpt_path = settings.take_required("checkpoint");
  const fs::path dataset_path = settings.take_required("dataset");
  settings.take("seed");  // accepted for interface uniformity; unused
  settings.reject_unknown("embed");

  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Dataset dataset = read_dataset(dataset_path);
  if (dataset.inputs.cols() != ckpt.spec.input_dim()) {
    throw ConfigError("embed: dataset dimension " + std::to_string(dataset.inputs.cols()) +
                      " does not match checkpoint input dimension " +
                      std::to_string(ckpt.spec.input_dim()));
  }

  EmbeddingSet set;
  set.embeddings = forward(ckpt.spec, ckpt.model.encoder, dataset.inputs);
  set.identities = dataset.identity_labels;
  set.ages = dataset.age_labels;

  write_embeddings(out / "embeddings.tsv", set);
  write_decomposed(out / "decomposed.tsv", set);
  std::cout << "embedded " << set.size() << " samples at dimension " << set.embeddings.cols()
            << "\nwrote " << (out / "embeddings.tsv").string() << ", "
            << (out / "decomposed.tsv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

std::vector<ScoredPair> scores_from_pairs(const EmbeddingSet& set, const std::vector<Pair>& pairs) {
  std::vector<ScoredPair> scores;
  scores.reserve(pairs.size());
  for (const Pair& p : pairs) {
    if (p.a >= set.size() || p.b >= set.size()) {
      throw ConfigError("eval: pair index (" + std::to_string(p.a) + "," + std::to_string(p.b) +
                        ") outside the embedding file of " + std::to_string(set.size()) + " rows");
    }
    ScoredPair sp;
    sp.score = identity_similarity(set.embeddings.row(p.a).transpose(),
                                   set.embeddings.row(p.b).transpose());
    sp.same = p.label == 1;
    scores.push_back(sp);
  }
  return scores;
}

int cmd_eval(const CommonArgs& args) {
  Settings settings = gather_settings(args);
  const fs::path out = prepare_out_dir(settings);
  const std::string protocol = settings.take_required("protocol");
  settings.take("seed");  // protocols are deterministic; accepted, unused

  EvalReport report;
  if (protocol == "rank1" || protocol == "distractor_rank1") {
    const fs::path gallery_path = settings.take_required("gallery");
    const fs::path probe_path = settings.take_required("probe");
    const EmbeddingSet gallery = read_embeddings(gallery_path);
    const EmbeddingSet probe = read_embeddings(probe_path);
    if (protocol == "rank1") {
      settings.reject_unknown("eval");
      report = rank1_identification(gallery, probe);
    } else {
      const fs::path distractor_path = settings.take_required("distractors");
      settings.reject_unknown("eval");
      report = distractor_rank1(gallery, read_embeddings(distractor_path).embeddings, probe);
      report.config["distractors"] = distractor_path.string();
    }
    report.config["gallery"] = gallery_path.string();
    report.config["probe"] = probe_path.string();
  } else if (protocol == "roc" || protocol == "kfold") {
    const fs::path emb_path = settings.take_required("embeddings");
    const fs::path pairs_path = settings.take_required("pairs");
    const long folds = settings.take_long("folds", 10);
    settings.reject_unknown("eval");
    const EmbeddingSet set = read_embeddings(emb_path);
    const std::vector<ScoredPair> scores = scores_from_pairs(set, read_pairs(pairs_path));
    if (protocol == "roc") {
      const RocCurve curve = roc_auc(scores);
      report.protocol = "roc";
      report.metrics["auc"] = curve.auc;
      report.counts["pairs"] = static_cast<Index>(scores.size());
      report.counts["points"] = static_cast<Index>(curve.points.size());
    } else {
      report = kfold_accuracy(scores, folds);
    }
    report.config["embeddings"] = emb_path.string();
    report.config["pairs"] = pairs_path.string();
  } else {
    throw ConfigError("eval: unknown protocol '" + protocol +
                      "' (expected rank1, distractor_rank1, roc or kfold)");
  }

  write_report(out / "report.json", report);
  std::string headline = "accuracy";
  if (report.metrics.count("rank1_rate")) headline = "rank1_rate";
  else if (report.metrics.count("auc")) headline = "auc";
  std::cout << report.protocol << " " << headline << ": " << fmt_real(report.metrics.at(headline))
            << "\nwrote " << (out / "report.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// toy-fig3: generate toy data, train all three modes, emit scatter data and
// a summary with the norm-age correlation per mode.
// ---------------------------------------------------------------------------

int cmd_toy_fig3(const CommonArgs& args) {
  Settings settings = gather_settings(args);
  const fs::path out = prepare_out_dir(settings);
  const std::uint64_t seed = settings.take_u64("seed", 1);

  SyntheticSpec data_spec = toy_synthetic_spec(seed);
  data_spec.num_identities = settings.take_long("num_identities", data_spec.num_identities);
  data_spec.input_dim = settings.take_long("input_dim", data_spec.input_dim);
  data_spec.samples_per_identity =
      settings.take_long("samples_per_identity", data_spec.samples_per_identity);
  if (const auto range = settings.take_real_pair("age_range")) {
    data_spec.age_min = range->first;
    data_spec.age_max = range->second;
  }
  data_spec.age_effect = settings.take_real("age_effect", data_spec.age_effect);
  data_spec.noise_sigma = settings.take_real("noise_sigma", data_spec.noise_sigma);

  TrainConfig base_cfg = toy_train_config(LossMode::oe, seed);
  base_cfg.epochs = settings.take_long("epochs", base_cfg.epochs);
  base_cfg.batch_size = settings.take_long("batch_size", base_cfg.batch_size);
  base_cfg.learning_rate = settings.take_real("learning_rate", base_cfg.learning_rate);
  base_cfg.margin.margin = static_cast<int>(settings.take_long("m", base_cfg.margin.margin));
  base_cfg.margin.scale = settings.take_real("s", base_cfg.margin.scale);
  base_cfg.multi_task.lambda = settings.take_real("lambda", base_cfg.multi_task.lambda);
  settings.reject_unknown("toy-fig3");
  data_spec.validate();
  base_cfg.validate();

  const Dataset dataset = to_dataset(generate(data_spec), data_spec.num_identities);
  const EncoderSpec spec = toy_encoder_spec(data_spec.input_dim);

  std::string summary = "# oefd-toy-summary v1\nmode\ttrain_accuracy\tnorm_age_pearson\n";
  for (const LossMode mode : {LossMode::softmax, LossMode::a_softmax, LossMode::oe}) {
    TrainConfig cfg = base_cfg;
    cfg.mode = mode;
    const TrainResult result = train(dataset, spec, cfg);

    const Matrix embeddings = forward(spec, result.checkpoint.model.encoder, dataset.inputs);
    const Real accuracy = classification_accuracy(
        embeddings, result.checkpoint.model.classifier.weights, dataset.identity_labels);
    const Vector norms = embeddings.rowwise().norm();
    const Real correlation = pearson_correlation(norms, dataset.age_labels);

    std::string scatter = "# oefd-toy-scatter v1\nx\ty\tidentity\tage\tnorm\n";
    for (Index i = 0; i < embeddings.rows(); ++i) {
      scatter += fmt_real(embeddings(i, 0));
      scatter += '\t';
      scatter += fmt_real(embeddings(i, 1));
      scatter += '\t';
      scatter += std::to_string(dataset.identity_labels[static_cast<std::size_t>(i)]);
      scatter += '\t';
      scatter += fmt_real(dataset.age_labels[i]);
      scatter += '\t';
      scatter += fmt_real(norms[i]);
      scatter += '\n';
    }
    const fs::path scatter_path = out / ("scatter_" + loss_mode_name(mode) + ".tsv");
    std::ofstream sf(scatter_path, std::ios::binary);
    if (!sf) throw IoError("toy-fig3: cannot write '" + scatter_path.string() + "'");
    sf << scatter;

    summary += loss_mode_name(mode);
    summary += '\t';
    summary += fmt_real(accuracy);
    summary += '\t';
    summary += fmt_real(correlation);
    summary += '\n';
    std::cout << loss_mode_name(mode) << ": train_accuracy=" << fmt_real(accuracy)
              << " norm_age_pearson=" << fmt_real(correlation) << "\n";
  }

  std::ofstream sf(out / "summary.tsv", std::ios::binary);
  if (!sf) throw IoError("toy-fig3: cannot write summary");
  sf << summary;
  std::cout << "wrote 3 scatter files and " << (out / "summary.tsv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// grad-check
// ---------------------------------------------------------------------------

int cmd_grad_check(const CommonArgs& args, bool corrupt) {
  Settings settings = gather_settings(args);
  settings.take("out");
  const std::uint64_t seed = settings.take_u64("seed", 2024);
  settings.reject_unknown("grad-check");

  const GradCheckReport report = run_gradient_checks(seed, corrupt);
  for (const GradCheckCase& c : report.cases) {
    std::printf("%-42s rel_error=%-12.3e %s\n", c.name.c_str(), c.rel_error,
                c.passed ? "ok" : "FAIL");
  }
  std::printf("%zu configurations, tolerance %.0e, h %.0e\n", report.cases.size(),
              report.tolerance, report.step);
  if (!report.all_passed()) {
    std::printf("gradient check FAILED\n");
    return 4;
  }
  std::printf("gradient check passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthogonal embedding decomposition toolkit"};
  app.require_subcommand(1);

  CommonArgs gen_args, train_args, embed_args, eval_args, toy_args, grad_args;
  bool corrupt_gradient = false;

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic cross-age dataset");
  add_common_flags(gen, gen_args);
  CLI::App* tr = app.add_subcommand("train", "train an encoder on a dataset file");
  add_common_flags(tr, train_args);
  CLI::App* embed = app.add_subcommand("embed", "embed a dataset with a checkpoint");
  add_common_flags(embed, embed_args);
  CLI::App* ev = app.add_subcommand("eval", "run an evaluation protocol");
  add_common_flags(ev, eval_args);
  CLI::App* toy = app.add_subcommand("toy-fig3", "2-D toy comparison of the three loss modes");
  add_common_flags(toy, toy_args);
  CLI::App* grad = app.add_subcommand("grad-check", "verify analytic gradients");
  add_common_flags(grad, grad_args);
  grad->add_flag("--corrupt-gradient", corrupt_gradient,
                 "testing hook: corrupt one gradient to confirm detection");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_args);
    if (tr->parsed()) return cmd_train(train_args);
    if (embed->parsed()) return cmd_embed(embed_args);
    if (ev->parsed()) return cmd_eval(eval_args);
    if (toy->parsed()) return cmd_toy_fig3(toy_args);
    if (grad->parsed()) return cmd_grad_check(grad_args, corrupt_gradient);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
