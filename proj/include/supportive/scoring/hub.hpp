#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "supportive/error.hpp"
#include "supportive/scoring/score_table.hpp"
#include "supportive/scoring/scorer.hpp"
#include "supportive/util/hash.hpp"
#include "supportive/util/jsonl.hpp"

namespace supportive {

/// Disk cache of one scorer's outputs over one corpus, keyed by
/// (corpus fingerprint, scorer name, scorer version).
class ScoreCache {
 public:
  explicit ScoreCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(const std::string& corpus_fp, const std::string& scorer,
                                 const std::string& version) const {
    return dir_ / (Fingerprint{}.field(corpus_fp).field(scorer).field(version).hex() + ".jsonl");
  }

  /// Cached probabilities in item order, or nullopt on a miss or an entry
  /// that does not cover every item.
  std::optional<std::vector<double>> load(std::span<const TextItem> items, const std::string& corpus_fp,
                                          const std::string& scorer, const std::string& version) const {
    const auto path = path_for(corpus_fp, scorer, version);
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::unordered_map<std::string, double> cached;
    try {
      read_jsonl(path, [&](const json& j, std::size_t) { cached[j.at("id").get<std::string>()] = j.at("p").get<double>(); });
    } catch (const std::exception&) {
      return std::nullopt;
    }
    std::vector<double> out;
    out.reserve(items.size());
    for (const auto& it : items) {
      auto found = cached.find(it.id);
      if (found == cached.end()) return std::nullopt;
      out.push_back(found->second);
    }
    return out;
  }

  void store(std::span<const TextItem> items, std::span<const double> probabilities, const std::string& corpus_fp,
             const std::string& scorer, const std::string& version) const {
    auto out = open_output(path_for(corpus_fp, scorer, version));
    write_json_line(out, json{{"provenance", {{"corpus_fingerprint", corpus_fp}, {"scorer", scorer}, {"version", version}}}});
    for (std::size_t i = 0; i < items.size(); ++i) write_json_line(out, json{{"id", items[i].id}, {"p", probabilities[i]}});
  }

 private:
  std::filesystem::path dir_;
};

struct ScoreOptions {
  std::size_t jobs = 1;
  const ScoreCache* cache = nullptr;
};

/// Named scorers feeding the score table (typically "hope" and "empathy").
class ScorerHub {
 public:
  void add(std::string name, std::unique_ptr<Scorer> scorer) {
    if (name.empty()) throw ConfigError("scorer name must not be empty");
    for (const auto& n : names_)
      if (n == name) throw ConfigError("scorer '" + name + "' registered twice");
    names_.push_back(std::move(name));
    scorers_.push_back(std::move(scorer));
  }

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }

  ScoreTable score_corpus(std::span<const TextItem> items, const ScoreOptions& opt = {}) {
    if (scorers_.empty()) throw ConfigError("no scorers registered");
    std::unordered_set<std::string_view> seen;
    for (const auto& it : items)
      if (!seen.insert(it.id).second) throw DataError("duplicate tweet id '" + it.id + "' in scoring input");

    const std::string fp = corpus_fingerprint(items);
    ScoreTable table(names_, fp);
    for (std::size_t s = 0; s < scorers_.size(); ++s) {
      const std::string version = scorers_[s]->version();
      std::optional<std::vector<double>> ps;
      if (opt.cache) ps = opt.cache->load(items, fp, names_[s], version);
      if (!ps) {
        ps = scorers_[s]->score(items, opt.jobs);
        if (ps->size() != items.size())
          throw ScoringError("scorer '" + names_[s] + "' returned " + std::to_string(ps->size()) + " scores for " +
                             std::to_string(items.size()) + " items");
        if (opt.cache) opt.cache->store(items, *ps, fp, names_[s], version);
      }
      for (std::size_t i = 0; i < items.size(); ++i) {
        const double p = (*ps)[i];
        if (!(p >= 0.0 && p <= 1.0))
          throw ProtocolError("scorer '" + names_[s] + "' produced probability outside [0,1] for id '" + items[i].id + "'");
        table.set(items[i].id, s, p);
      }
    }
    return table;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<Scorer>> scorers_;
};

}  // namespace supportive
