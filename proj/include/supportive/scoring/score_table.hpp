#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "supportive/corpus/partition.hpp"
#include "supportive/corpus/text.hpp"
#include "supportive/error.hpp"
#include "supportive/util/hash.hpp"
#include "supportive/util/jsonl.hpp"

namespace supportive {

/// A tweet to be scored: its id and normalized text.
struct TextItem {
  std::string id;
  CleanText text;
};

/// Order-independent fingerprint of (id, text) pairs.
inline std::string corpus_fingerprint(std::span<const TextItem> items) {
  std::vector<const TextItem*> sorted;
  sorted.reserve(items.size());
  for (const auto& it : items) sorted.push_back(&it);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  Fingerprint fp;
  for (const auto* it : sorted) fp.field(it->id).field(it->text.text);
  return fp.hex();
}

/// Per-tweet probabilities from each registered scorer.
class ScoreTable {
 public:
  ScoreTable() = default;
  explicit ScoreTable(std::vector<std::string> scorers, std::string corpus_fingerprint = {})
      : scorers_(std::move(scorers)), corpus_fingerprint_(std::move(corpus_fingerprint)) {}

  const std::vector<std::string>& scorers() const noexcept { return scorers_; }
  const std::string& corpus_fingerprint() const noexcept { return corpus_fingerprint_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool contains(const std::string& id) const { return rows_.contains(id); }
  const std::map<std::string, std::vector<double>>& rows() const noexcept { return rows_; }

  std::optional<std::size_t> scorer_index(std::string_view name) const {
    auto it = std::find(scorers_.begin(), scorers_.end(), name);
    if (it == scorers_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - scorers_.begin());
  }

  std::size_t require_scorer(std::string_view name) const {
    auto i = scorer_index(name);
    if (!i) throw DataError("unknown scorer '" + std::string(name) + "' in score table");
    return *i;
  }

  void set(const std::string& id, std::size_t scorer, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("probability out of [0,1] for '" + id + "'");
    auto [it, inserted] = rows_.try_emplace(id);
    if (inserted) it->second.assign(scorers_.size(), std::numeric_limits<double>::quiet_NaN());
    it->second.at(scorer) = p;
  }

  double at(const std::string& id, std::size_t scorer) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) throw DataError("tweet '" + id + "' is not in the score table");
    const double p = it->second.at(scorer);
    if (std::isnan(p)) throw DataError("tweet '" + id + "' has no score from '" + scorers_[scorer] + "'");
    return p;
  }

  double at(const std::string& id, std::string_view scorer) const { return at(id, require_scorer(scorer)); }

  /// Every row carries a score from every scorer.
  bool complete() const {
    for (const auto& [id, ps] : rows_)
      for (double p : ps)
        if (std::isnan(p)) return false;
    return true;
  }

  bool covers(const IdSet& ids) const {
    return std::all_of(ids.begin(), ids.end(), [&](const std::string& id) { return rows_.contains(id); });
  }

  /// Fingerprint of the full table contents, including scorer names.
  std::string fingerprint() const {
    Fingerprint fp;
    for (const auto& s : scorers_) fp.field(s);
    for (const auto& [id, ps] : rows_) {
      fp.field(id);
      for (double p : ps) fp.field(json(p).dump());
    }
    return fp.hex();
  }

 private:
  std::vector<std::string> scorers_;
  std::string corpus_fingerprint_;
  std::map<std::string, std::vector<double>> rows_;
};

enum class Direction { Descending, Ascending };

/// Orders ids by the named scorer's probability; ties go to the smaller id.
inline std::vector<std::string> rank(const ScoreTable& table, std::string_view scorer, const IdSet& ids,
                                     Direction direction = Direction::Descending) {
  const std::size_t s = table.require_scorer(scorer);
  std::vector<std::pair<double, const std::string*>> keyed;
  keyed.reserve(ids.size());
  for (const auto& id : ids) keyed.emplace_back(table.at(id, s), &id);
  std::sort(keyed.begin(), keyed.end(), [direction](const auto& a, const auto& b) {
    if (a.first != b.first) return direction == Direction::Descending ? a.first > b.first : a.first < b.first;
    return *a.second < *b.second;
  });
  std::vector<std::string> out;
  out.reserve(keyed.size());
  for (const auto& [p, id] : keyed) out.push_back(*id);
  return out;
}

inline void write_score_table(const std::filesystem::path& path, const ScoreTable& table, json provenance = json::object()) {
  auto out = open_output(path);
  provenance["scorers"] = table.scorers();
  provenance["corpus_fingerprint"] = table.corpus_fingerprint();
  provenance["table_fingerprint"] = table.fingerprint();
  write_json_line(out, json{{"provenance", provenance}});
  for (const auto& [id, ps] : table.rows()) {
    json scores = json::object();
    for (std::size_t i = 0; i < ps.size(); ++i) scores[table.scorers()[i]] = ps[i];
    write_json_line(out, json{{"id", id}, {"scores", scores}});
  }
}

inline ScoreTable read_score_table(const std::filesystem::path& path) {
  std::optional<ScoreTable> table;
  read_jsonl(
      path,
      [&](const json& j, std::size_t line) {
        if (!table) throw DataError(path.string() + ": score table lacks a provenance header");
        const auto id = j.at("id").get<std::string>();
        for (const auto& [name, p] : j.at("scores").items()) {
          auto s = table->scorer_index(name);
          if (!s) throw DataError(path.string() + ":" + std::to_string(line) + ": unknown scorer '" + name + "'");
          table->set(id, *s, p.get<double>());
        }
      },
      [&](const json& prov) {
        table.emplace(prov.at("scorers").get<std::vector<std::string>>(),
                      prov.value("corpus_fingerprint", std::string{}));
      });
  if (!table) throw DataError(path.string() + ": empty score table");
  if (!table->complete()) throw DataError(path.string() + ": score table is incomplete");
  return std::move(*table);
}

}  // namespace supportive
