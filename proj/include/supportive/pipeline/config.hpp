#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "supportive/corpus/corpus.hpp"
#include "supportive/error.hpp"
#include "supportive/linear/model.hpp"
#include "supportive/util/hash.hpp"
#include "supportive/util/jsonl.hpp"

namespace supportive {

namespace fs = std::filesystem;

struct ScorerSpec {
  std::string name;
  bool external = false;
  // builtin
  fs::path train;  // seed dataset for train-scorer
  std::optional<fs::path> model;  // ready-made model file; skips train-scorer
  LossKind kind = LossKind::Logistic;
  // external
  std::vector<std::string> command;
  std::int64_t timeout_ms = 60'000;
  std::size_t batch_size = 256;
  std::size_t workers = 1;
  std::string version;
};

/// Every constant the pipeline uses. Relative paths resolve against the
/// directory holding the config file.
struct PipelineConfig {
  fs::path base_dir;
  fs::path corpus;
  FieldMapping mapping;
  fs::path groups;
  fs::path output_dir = "out";
  std::optional<fs::path> cache_dir;

  std::size_t min_tokens = 10;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  std::vector<ScorerSpec> scorers;
  TrainConfig train;
  std::size_t min_df = 1;
  double scorer_train_fraction = 0.9;

  std::size_t eval_n = 1000;
  std::size_t annotators = 3;
  std::optional<fs::path> annotation_sheet;
  std::vector<fs::path> adjudication_sheets;

  std::size_t top_k = 1000;
  std::size_t neg_per_list = 500;
  double bottom_frac = 0.8;
  bool exclude_eval = true;
  std::string hope_scorer = "hope";
  std::string empathy_scorer = "empathy";
  std::optional<std::size_t> baseline_n_pos;  // default: mirror the informed build
  std::optional<std::size_t> baseline_n_neg;

  std::uint64_t n_pairs = 100'000;
  std::size_t pair_runs = 5;

  std::size_t runs = 5;
  std::vector<LossKind> kinds{LossKind::Hinge};
  double split_train = 0.9;
  double split_validation = 0.1;
  std::optional<fs::path> supervised;

  std::size_t top_n = 100;

  json effective = json::object();     // the config after overrides
  std::vector<std::string> overrides;  // "key=value" as given, minus run-local keys

  fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }
  fs::path out(const fs::path& rel) const { return resolve(output_dir) / rel; }
  fs::path cache() const { return cache_dir ? resolve(*cache_dir) : out("cache"); }

  /// Hash of the effective config without run-local keys (output location,
  /// worker count), so two runs differing only in those agree.
  std::string fingerprint() const {
    json j = effective;
    j.erase("output_dir");
    j.erase("jobs");
    j.erase("cache_dir");
    return fingerprint_of(j.dump());
  }

  json provenance(std::string_view command) const {
    return json{{"command", command}, {"config_fingerprint", fingerprint()}, {"seed", seed}, {"overrides", overrides}};
  }
};

namespace config_detail {

inline const std::set<std::string>& run_local_keys() {
  static const std::set<std::string> keys{"output_dir", "jobs", "cache_dir"};
  return keys;
}

inline json parse_override_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  return v.is_discarded() ? json(text) : v;
}

/// "a.b.c=value" sets effective["a"]["b"]["c"]; value parsed as JSON when it
/// parses, kept as a string otherwise.
inline void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  std::string pointer;
  std::string key = assignment.substr(0, eq);
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    pointer += "/" + key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  j[json::json_pointer(pointer)] = parse_override_value(assignment.substr(eq + 1));
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw ConfigError("unknown config key '" + where + k + "'");
}

inline void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be positive");
}

inline LossKind kind_of(const std::string& s) {
  auto k = parse_loss_kind(s);
  if (!k) throw ConfigError("unknown model kind '" + s + "'");
  return *k;
}

}  // namespace config_detail

/// Builds a config from JSON (already carrying overrides).
inline PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j,
             {"corpus", "field_mapping", "groups", "output_dir", "cache_dir", "min_tokens", "seed", "jobs", "scorers",
              "train", "eval", "informed", "hashtag_baseline", "pair_rate", "experiment", "termfreq"},
             "");
  PipelineConfig c;
  c.base_dir = base_dir;
  c.effective = j;
  if (!j.contains("corpus")) throw ConfigError("config lacks 'corpus'");
  if (!j.contains("groups")) throw ConfigError("config lacks 'groups'");
  c.corpus = get_or<std::string>(j, "corpus", "");
  c.groups = get_or<std::string>(j, "groups", "");
  if (j.contains("field_mapping")) c.mapping = FieldMapping::from_json(j["field_mapping"]);
  c.output_dir = get_or<std::string>(j, "output_dir", "out");
  if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
  c.min_tokens = get_or<std::size_t>(j, "min_tokens", 10);
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.jobs = std::max<std::size_t>(1, get_or<std::size_t>(j, "jobs", 1));

  if (j.contains("scorers")) {
    if (!j["scorers"].is_object()) throw ConfigError("'scorers' must map names to scorer definitions");
    for (const auto& [name, s] : j["scorers"].items()) {
      check_keys(s, {"type", "train", "model", "kind", "command", "timeout_ms", "batch_size", "workers", "version"},
                 "scorers." + name + ".");
      ScorerSpec spec;
      spec.name = name;
      const auto type = get_or<std::string>(s, "type", "builtin");
      if (type == "external") {
        spec.external = true;
        spec.command = get_or<std::vector<std::string>>(s, "command", {});
        if (spec.command.empty()) throw ConfigError("external scorer '" + name + "' needs a command");
        spec.timeout_ms = get_or<std::int64_t>(s, "timeout_ms", 60'000);
        spec.batch_size = get_or<std::size_t>(s, "batch_size", 256);
        spec.workers = get_or<std::size_t>(s, "workers", 1);
        spec.version = get_or<std::string>(s, "version", "");
        require_positive(static_cast<double>(spec.timeout_ms), "scorers." + name + ".timeout_ms");
        require_positive(static_cast<double>(spec.batch_size), "scorers." + name + ".batch_size");
      } else if (type == "builtin") {
        spec.train = get_or<std::string>(s, "train", "");
        if (s.contains("model")) spec.model = s["model"].get<std::string>();
        if (spec.train.empty() && !spec.model) throw ConfigError("builtin scorer '" + name + "' needs 'train' or 'model'");
        spec.kind = kind_of(get_or<std::string>(s, "kind", "logistic"));
      } else {
        throw ConfigError("scorer '" + name + "' has unknown type '" + type + "'");
      }
      c.scorers.push_back(std::move(spec));
    }
  }

  if (j.contains("train")) {
    const auto& t = j["train"];
    check_keys(t, {"epochs", "learning_rate", "l2", "min_df", "scorer_train_fraction"}, "train.");
    c.train.epochs = get_or<std::size_t>(t, "epochs", c.train.epochs);
    c.train.learning_rate = get_or<double>(t, "learning_rate", c.train.learning_rate);
    c.train.l2 = get_or<double>(t, "l2", c.train.l2);
    c.min_df = get_or<std::size_t>(t, "min_df", 1);
    c.scorer_train_fraction = get_or<double>(t, "scorer_train_fraction", 0.9);
  }
  try {
    c.train.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(c.scorer_train_fraction > 0.0 && c.scorer_train_fraction < 1.0))
    throw ConfigError("train.scorer_train_fraction must lie in (0, 1)");

  if (j.contains("eval")) {
    const auto& e = j["eval"];
    check_keys(e, {"n", "annotators", "annotation_sheet", "adjudication_sheets"}, "eval.");
    c.eval_n = get_or<std::size_t>(e, "n", 1000);
    c.annotators = get_or<std::size_t>(e, "annotators", 3);
    if (e.contains("annotation_sheet")) c.annotation_sheet = e["annotation_sheet"].get<std::string>();
    for (const auto& p : get_or<std::vector<std::string>>(e, "adjudication_sheets", {})) c.adjudication_sheets.emplace_back(p);
  }
  if (j.contains("informed")) {
    const auto& i = j["informed"];
    check_keys(i, {"top_k", "neg_per_list", "bottom_frac", "exclude_eval", "hope_scorer", "empathy_scorer"}, "informed.");
    c.top_k = get_or<std::size_t>(i, "top_k", 1000);
    c.neg_per_list = get_or<std::size_t>(i, "neg_per_list", 500);
    c.bottom_frac = get_or<double>(i, "bottom_frac", 0.8);
    c.exclude_eval = get_or<bool>(i, "exclude_eval", true);
    c.hope_scorer = get_or<std::string>(i, "hope_scorer", "hope");
    c.empathy_scorer = get_or<std::string>(i, "empathy_scorer", "empathy");
  }
  if (j.contains("hashtag_baseline")) {
    const auto& h = j["hashtag_baseline"];
    check_keys(h, {"n_pos", "n_neg"}, "hashtag_baseline.");
    if (h.contains("n_pos")) c.baseline_n_pos = h["n_pos"].get<std::size_t>();
    if (h.contains("n_neg")) c.baseline_n_neg = h["n_neg"].get<std::size_t>();
  }
  if (j.contains("pair_rate")) {
    const auto& p = j["pair_rate"];
    check_keys(p, {"n_pairs", "runs"}, "pair_rate.");
    c.n_pairs = get_or<std::uint64_t>(p, "n_pairs", 100'000);
    c.pair_runs = get_or<std::size_t>(p, "runs", 5);
  }
  if (j.contains("experiment")) {
    const auto& x = j["experiment"];
    check_keys(x, {"runs", "kinds", "split", "supervised"}, "experiment.");
    c.runs = get_or<std::size_t>(x, "runs", 5);
    if (x.contains("kinds")) {
      c.kinds.clear();
      for (const auto& k : x["kinds"].get<std::vector<std::string>>()) c.kinds.push_back(kind_of(k));
      if (c.kinds.empty()) throw ConfigError("experiment.kinds must not be empty");
    }
    if (x.contains("split")) {
      check_keys(x["split"], {"train", "validation"}, "experiment.split.");
      c.split_train = get_or<double>(x["split"], "train", 0.9);
      c.split_validation = get_or<double>(x["split"], "validation", 0.1);
    }
    if (x.contains("supervised")) c.supervised = x["supervised"].get<std::string>();
  }
  if (j.contains("termfreq")) {
    check_keys(j["termfreq"], {"top_n"}, "termfreq.");
    c.top_n = get_or<std::size_t>(j["termfreq"], "top_n", 100);
  }

  require_positive(static_cast<double>(c.min_tokens), "min_tokens");
  require_positive(static_cast<double>(c.eval_n), "eval.n");
  require_positive(static_cast<double>(c.top_k), "informed.top_k");
  require_positive(static_cast<double>(c.neg_per_list), "informed.neg_per_list");
  require_positive(static_cast<double>(c.n_pairs), "pair_rate.n_pairs");
  require_positive(static_cast<double>(c.pair_runs), "pair_rate.runs");
  require_positive(static_cast<double>(c.runs), "experiment.runs");
  require_positive(static_cast<double>(c.top_n), "termfreq.top_n");
  if (c.annotators < 2) throw ConfigError("eval.annotators must be at least 2");
  if (!(c.bottom_frac > 0.0 && c.bottom_frac < 1.0)) throw ConfigError("informed.bottom_frac must lie in (0, 1)");
  if (!(c.split_train > 0.0 && c.split_validation >= 0.0) || std::abs(c.split_train + c.split_validation - 1.0) > 1e-9)
    throw ConfigError("experiment.split fractions must be non-negative and sum to 1");
  return c;
}

struct ConfigOverrides {
  std::vector<std::string> set;  // "key=value"
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<fs::path> output_dir;
};

inline PipelineConfig load_config(const fs::path& path, const ConfigOverrides& ov = {}) {
  using namespace config_detail;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  json j = json::parse(in, nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("config '" + path.string() + "' is not valid JSON");

  std::vector<std::string> logged;
  auto record = [&](const std::string& assignment) {
    if (!run_local_keys().contains(assignment.substr(0, assignment.find('=')))) logged.push_back(assignment);
  };
  for (const auto& s : ov.set) {
    apply_override(j, s);
    record(s);
  }
  if (ov.seed) {
    j["seed"] = *ov.seed;
    record("seed=" + std::to_string(*ov.seed));
  }
  if (ov.jobs) j["jobs"] = *ov.jobs;
  PipelineConfig c = config_from_json(j, fs::absolute(path).parent_path());
  if (ov.output_dir) c.output_dir = fs::absolute(*ov.output_dir);
  c.overrides = std::move(logged);
  return c;
}

}  // namespace supportive
