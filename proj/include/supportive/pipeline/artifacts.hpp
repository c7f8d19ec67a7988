#pragma once

#include <filesystem>
#include <map>
#include <regex>
#include <string>
#include <unordered_map>
#include <vector>

#include "supportive/corpus/country.hpp"
#include "supportive/corpus/partition.hpp"
#include "supportive/corpus/text.hpp"
#include "supportive/error.hpp"
#include "supportive/pipeline/config.hpp"
#include "supportive/util/hash.hpp"
#include "supportive/util/jsonl.hpp"
#include "supportive/weaklabel/dataset.hpp"

namespace supportive::pipeline {

// Output layout, relative to the output directory.
namespace artifact {
inline constexpr const char* kIngest = "ingest.jsonl";
inline constexpr const char* kPartition = "partition.jsonl";
inline constexpr const char* kScorerDir = "scorers";
inline constexpr const char* kScorerTraining = "scorers/training.jsonl";
inline constexpr const char* kScores = "scores.jsonl";
inline constexpr const char* kEvalSample = "eval_sample.jsonl";
inline constexpr const char* kEvalSheetStem = "eval_sheet";
inline constexpr const char* kInformed = "informed.jsonl";
inline constexpr const char* kHashtag = "hashtag.jsonl";
inline constexpr const char* kPairRateTsv = "pair_rate.tsv";
inline constexpr const char* kPairRateJsonl = "pair_rate.jsonl";
inline constexpr const char* kKappaTsv = "kappa.tsv";
inline constexpr const char* kKappaJsonl = "kappa.jsonl";
inline constexpr const char* kGold = "gold.jsonl";
inline constexpr const char* kMergedSheetStem = "annotations";
inline constexpr const char* kAdjudicationStem = "adjudication";
inline constexpr const char* kReportTsv = "eval_report.tsv";
inline constexpr const char* kReportJsonl = "eval_report.jsonl";
inline constexpr const char* kModelDir = "models";
inline constexpr const char* kPredictions = "predictions.jsonl";
inline constexpr const char* kHashtagCountsTsv = "hashtag_counts.tsv";
inline constexpr const char* kHashtagCountsJsonl = "hashtag_counts.jsonl";
inline constexpr const char* kEngagementTsv = "engagement.tsv";
inline constexpr const char* kEngagementJsonl = "engagement.jsonl";
inline constexpr const char* kPredictedEngagementTsv = "engagement_predicted.tsv";
inline constexpr const char* kPredictedEngagementJsonl = "engagement_predicted.jsonl";
inline constexpr const char* kJaccardTsv = "jaccard.tsv";
inline constexpr const char* kJaccardJsonl = "jaccard.jsonl";
inline constexpr const char* kTermfreqTsv = "termfreq.tsv";
inline constexpr const char* kTermfreqJsonl = "termfreq.jsonl";
inline constexpr const char* kManifest = "MANIFEST.tsv";

inline std::string scorer_model(const std::string& name) { return std::string(kScorerDir) + "/" + name + ".model"; }
}  // namespace artifact

/// Seed for one named consumer of randomness, derived from the config seed.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view label) {
  return derive_seed(seed, Fingerprint{}.field(label).value());
}

/// Path of an upstream artifact, or MissingArtifactError naming its producer.
inline fs::path require(const PipelineConfig& cfg, const std::string& rel, const std::string& producer) {
  const auto p = cfg.out(rel);
  if (!fs::exists(p)) throw MissingArtifactError(rel, producer);
  return p;
}

inline void write_tsv_provenance(std::ostream& out, const json& provenance) {
  out << "# provenance " << provenance.dump() << '\n';
}

// ---------------------------------------------------------------------------
// MANIFEST.tsv: one row per pipeline output with its content fingerprint, the
// subcommand that wrote it, and the config fingerprint it was written under.

struct ManifestEntry {
  std::string fingerprint;
  std::string producer;
  std::string config_fingerprint;
};

class Manifest {
 public:
  explicit Manifest(fs::path out_dir) : dir_(std::move(out_dir)) {
    const auto path = dir_ / artifact::kManifest;
    if (!fs::exists(path)) return;
    auto in = open_input(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#' || line.rfind("path\t", 0) == 0) continue;
      std::vector<std::string> cells;
      std::size_t start = 0;
      while (true) {
        const auto tab = line.find('\t', start);
        cells.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (cells.size() != 4) throw DataError(path.string() + ": malformed row '" + line + "'");
      entries_[cells[0]] = {cells[1], cells[2], cells[3]};
    }
  }

  void record(const std::string& rel, const std::string& producer, const std::string& config_fp) {
    entries_[rel] = {fingerprint_file((dir_ / rel).string()), producer, config_fp};
  }

  void forget(const std::string& rel) { entries_.erase(rel); }

  void save() const {
    auto out = open_output(dir_ / artifact::kManifest);
    out << "path\tfingerprint\tproducer\tconfig_fingerprint\n";
    for (const auto& [rel, e] : entries_)
      out << rel << '\t' << e.fingerprint << '\t' << e.producer << '\t' << e.config_fingerprint << '\n';
  }

  const std::map<std::string, ManifestEntry>& entries() const noexcept { return entries_; }

 private:
  fs::path dir_;
  std::map<std::string, ManifestEntry> entries_;
};

/// Files written by one subcommand; commit() fingerprints them into the manifest.
class Outputs {
 public:
  Outputs(const PipelineConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {}

  fs::path path(const std::string& rel) {
    written_.push_back(rel);
    return cfg_.out(rel);
  }

  /// Deletes a stale output from an earlier run.
  void remove(const std::string& rel) {
    fs::remove(cfg_.out(rel));
    removed_.push_back(rel);
  }

  void commit() const {
    Manifest m(cfg_.resolve(cfg_.output_dir));
    for (const auto& rel : removed_) m.forget(rel);
    const auto fp = cfg_.fingerprint();
    for (const auto& rel : written_) m.record(rel, command_, fp);
    m.save();
  }

  const std::vector<std::string>& written() const noexcept { return written_; }

 private:
  const PipelineConfig& cfg_;
  std::string command_;
  std::vector<std::string> written_;
  std::vector<std::string> removed_;
};

/// The config fingerprint embedded in an output file's provenance, looked for
/// in its first few lines.
inline std::optional<std::string> embedded_config_fingerprint(const fs::path& path) {
  static const std::regex re(R"re("config_fingerprint":"([0-9a-f]{16})")re");
  std::ifstream in(path, std::ios::binary);
  std::string line;
  for (int i = 0; i < 3 && std::getline(in, line); ++i) {
    std::smatch m;
    if (std::regex_search(line, m, re)) return m[1].str();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ingested corpus: one row per well-formed record with its cleaned text,
// length-filter verdict and country label.

struct IngestedTweet {
  std::string id;
  CleanText text;
  bool passes = false;
  std::vector<std::string> hashtags;
  std::uint64_t likes = 0;
  std::uint64_t retweets = 0;
  CountryLabel country;
};

struct IngestedCorpus {
  std::vector<IngestedTweet> tweets;
  std::string corpus_fingerprint;  // of the raw input file
  std::string file_fingerprint;    // of ingest.jsonl

  TextIndex texts() const {
    TextIndex t;
    t.reserve(tweets.size());
    for (const auto& tw : tweets) t.emplace(tw.id, tw.text);
    return t;
  }

  std::unordered_map<std::string, CountryBucket> buckets() const {
    std::unordered_map<std::string, CountryBucket> b;
    b.reserve(tweets.size());
    for (const auto& tw : tweets) b.emplace(tw.id, bucket_of(tw.country.value));
    return b;
  }
};

inline json ingested_to_json(const IngestedTweet& t) {
  return json{{"id", t.id},
              {"text", t.text.text},
              {"tokens", t.text.token_count()},
              {"passes_filter", t.passes},
              {"hashtags", t.hashtags},
              {"like_count", t.likes},
              {"retweet_count", t.retweets},
              {"country", to_string(t.country.value)},
              {"country_source", to_string(t.country.source)},
              {"country_consistent", t.country.consistent}};
}

inline IngestedCorpus load_ingested(const PipelineConfig& cfg) {
  const auto path = require(cfg, artifact::kIngest, "ingest");
  IngestedCorpus c;
  c.file_fingerprint = fingerprint_file(path.string());
  read_jsonl(
      path,
      [&](const json& j, std::size_t line) {
        try {
          IngestedTweet t;
          t.id = j.at("id").get<std::string>();
          t.text = CleanText::from_normalized(j.at("text").get<std::string>());
          t.passes = j.at("passes_filter").get<bool>();
          t.hashtags = j.at("hashtags").get<std::vector<std::string>>();
          t.likes = j.at("like_count").get<std::uint64_t>();
          t.retweets = j.at("retweet_count").get<std::uint64_t>();
          auto country = parse_country(j.at("country").get<std::string>());
          auto source = parse_country_source(j.at("country_source").get<std::string>());
          if (!country || !source) throw DataError("bad country label");
          t.country = {*country, *source, j.at("country_consistent").get<bool>()};
          c.tweets.push_back(std::move(t));
        } catch (const std::exception& e) {
          throw DataError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
      },
      [&](const json& prov) { c.corpus_fingerprint = prov.value("corpus_fingerprint", std::string{}); });
  return c;
}

struct LoadedPartition {
  CorpusPartition all;
  CorpusPartition filtered;  // tweets passing the length filter
  std::string file_fingerprint;
};

inline LoadedPartition load_partition(const PipelineConfig& cfg) {
  const auto path = require(cfg, artifact::kPartition, "partition");
  LoadedPartition p;
  p.file_fingerprint = fingerprint_file(path.string());
  read_jsonl(path, [&](const json& j, std::size_t line) {
    const auto side = parse_side(j.value("side", std::string{}));
    if (!side || !j.contains("id")) throw DataError(path.string() + ":" + std::to_string(line) + ": bad partition row");
    const auto id = j["id"].get<std::string>();
    p.all.side(*side).insert(id);
    if (j.value("passes_filter", false)) p.filtered.side(*side).insert(id);
  });
  return p;
}

}  // namespace supportive::pipeline
