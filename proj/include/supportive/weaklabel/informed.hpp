#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "supportive/corpus/partition.hpp"
#include "supportive/error.hpp"
#include "supportive/scoring/score_table.hpp"
#include "supportive/util/random.hpp"
#include "supportive/weaklabel/dataset.hpp"

namespace supportive {

struct InformedConfig {
  std::size_t top_k = 1000;
  std::size_t neg_per_list = 500;
  double bottom_frac = 0.8;
  std::uint64_t seed = 0;
  std::string hope_scorer = "hope";
  std::string empathy_scorer = "empathy";

  void validate() const {
    if (top_k == 0) throw ConfigError("top_k must be positive");
    if (neg_per_list == 0) throw ConfigError("neg_per_list must be positive");
    if (!(bottom_frac > 0.0 && bottom_frac < 1.0)) throw ConfigError("bottom_frac must lie in (0, 1)");
  }
};

/// Length of the low-scoring suffix of an n-item ranked list.
inline std::size_t bottom_count(std::size_t n, double bottom_frac) {
  return static_cast<std::size_t>(std::floor(bottom_frac * static_cast<double>(n)));
}

/// 0-based rank at which the bottom suffix starts.
inline std::size_t bottom_start(std::size_t n, double bottom_frac) { return n - bottom_count(n, bottom_frac); }

/// Bookkeeping for one informed build.
struct InformedStats {
  std::size_t positive_candidates = 0;  // 2 * top_k
  std::size_t positive_id_dupes = 0;    // same tweet in both top lists
  std::size_t positive_text_dupes = 0;  // distinct tweets, identical text (includes id dupes)
  std::size_t negative_candidates = 0;  // 2 * neg_per_list
  std::size_t negative_id_dupes = 0;
  std::size_t negative_text_dupes = 0;
  std::size_t negative_cross_dupes = 0;  // negative text equal to a positive text
  std::size_t excluded = 0;              // ids withheld by the exclusion set

  json to_json() const {
    return json{{"positive_candidates", positive_candidates}, {"positive_id_dupes", positive_id_dupes},
                {"positive_text_dupes", positive_text_dupes}, {"negative_candidates", negative_candidates},
                {"negative_id_dupes", negative_id_dupes},     {"negative_text_dupes", negative_text_dupes},
                {"negative_cross_dupes", negative_cross_dupes}, {"excluded", excluded}};
  }
};

struct InformedResult {
  WeakDataset dataset;
  InformedStats stats;
};

namespace informed_detail {

struct Candidate {
  std::string id;
  std::string origin;
};

// Union of ranked picks keeping first occurrence; a tweet picked from both
// lists keeps its first position and records both origins.
inline std::vector<Candidate> merge_by_id(const std::vector<std::vector<std::string>>& lists,
                                          const std::vector<std::string>& names, std::size_t& dupes) {
  std::vector<Candidate> out;
  std::map<std::string, std::size_t> at;
  for (std::size_t l = 0; l < lists.size(); ++l) {
    for (const auto& id : lists[l]) {
      auto [it, inserted] = at.try_emplace(id, out.size());
      if (inserted) {
        out.push_back({id, names[l]});
      } else {
        ++dupes;
        out[it->second].origin += "+" + names[l];
      }
    }
  }
  return out;
}

inline IdSet without(const IdSet& ids, const IdSet* exclude, std::size_t& removed) {
  if (!exclude) return ids;
  IdSet out;
  for (const auto& id : ids) {
    if (exclude->contains(id))
      ++removed;
    else
      out.insert(id);
  }
  return out;
}

}  // namespace informed_detail

/// Informed sampling. Positives are the top_k supportive tweets under each
/// scorer; negatives are neg_per_list tweets drawn without replacement from
/// the bottom fraction of each ranked not-supportive list. Exact text
/// duplicates are dropped (first occurrence wins), and negatives whose text
/// also appears among the positives are removed. Ids in `exclude` (typically
/// the evaluation sample) never enter either pool.
inline InformedResult build_informed(const ScoreTable& table, const CorpusPartition& part, const TextIndex& texts,
                                     const InformedConfig& cfg, const IdSet* exclude = nullptr) {
  using namespace informed_detail;
  cfg.validate();
  table.require_scorer(cfg.hope_scorer);
  table.require_scorer(cfg.empathy_scorer);

  InformedResult result;
  auto& st = result.stats;
  const IdSet sup = without(part.supportive, exclude, st.excluded);
  const IdSet non = without(part.not_supportive, exclude, st.excluded);
  if (!table.covers(sup) || !table.covers(non)) throw DataError("score table does not cover the partition");

  if (sup.size() < cfg.top_k)
    throw InsufficientDataError("supportive side has " + std::to_string(sup.size()) + " tweets; top_k needs " +
                                std::to_string(cfg.top_k) + " (short by " + std::to_string(cfg.top_k - sup.size()) + ")");
  const std::size_t tail = bottom_count(non.size(), cfg.bottom_frac);
  if (tail < cfg.neg_per_list)
    throw InsufficientDataError("bottom " + std::to_string(cfg.bottom_frac) + " of the not-supportive side holds " +
                                std::to_string(tail) + " tweets; neg_per_list needs " + std::to_string(cfg.neg_per_list) +
                                " (short by " + std::to_string(cfg.neg_per_list - tail) + ")");

  const std::vector<std::string> names{cfg.hope_scorer, cfg.empathy_scorer};

  std::vector<std::vector<std::string>> tops;
  for (const auto& s : names) {
    auto ranked = rank(table, s, sup);
    ranked.resize(cfg.top_k);
    tops.push_back(std::move(ranked));
  }
  st.positive_candidates = 2 * cfg.top_k;

  std::vector<std::vector<std::string>> draws;
  for (std::size_t l = 0; l < names.size(); ++l) {
    const auto ranked = rank(table, names[l], non);
    const std::size_t start = bottom_start(ranked.size(), cfg.bottom_frac);
    Rng rng = make_rng(derive_seed(cfg.seed, l + 1));
    std::vector<std::string> picked;
    for (std::size_t i : sample_indices(ranked.size() - start, cfg.neg_per_list, rng)) picked.push_back(ranked[start + i]);
    draws.push_back(std::move(picked));
  }
  st.negative_candidates = 2 * cfg.neg_per_list;

  std::unordered_set<std::string> positive_texts;
  for (auto& c : merge_by_id(tops, names, st.positive_id_dupes)) {
    const auto& t = text_of(texts, c.id);
    if (!positive_texts.insert(t.text).second) {
      ++st.positive_text_dupes;
      continue;
    }
    result.dataset.examples.push_back({c.id, t, Label::Supportive, Provenance::InformedPositive, c.origin});
  }
  st.positive_text_dupes += st.positive_id_dupes;

  std::unordered_set<std::string> negative_texts;
  for (auto& c : merge_by_id(draws, names, st.negative_id_dupes)) {
    const auto& t = text_of(texts, c.id);
    if (positive_texts.contains(t.text)) {
      ++st.negative_cross_dupes;
      continue;
    }
    if (!negative_texts.insert(t.text).second) {
      ++st.negative_text_dupes;
      continue;
    }
    result.dataset.examples.push_back({c.id, t, Label::NotSupportive, Provenance::InformedNegative, c.origin});
  }
  st.negative_text_dupes += st.negative_id_dupes;

  result.dataset.kind = "informed";
  result.dataset.config = json{{"top_k", cfg.top_k},
                               {"neg_per_list", cfg.neg_per_list},
                               {"bottom_frac", cfg.bottom_frac},
                               {"seed", cfg.seed},
                               {"scorers", names},
                               {"exclude_eval", exclude != nullptr},
                               {"score_table", table.fingerprint()}};
  return result;
}

}  // namespace supportive
