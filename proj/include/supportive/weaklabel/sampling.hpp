#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supportive/corpus/partition.hpp"
#include "supportive/error.hpp"
#include "supportive/util/random.hpp"
#include "supportive/weaklabel/dataset.hpp"

namespace supportive {

namespace sampling_detail {

inline std::vector<std::string> pool(const IdSet& ids, const IdSet* exclude) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids)
    if (!exclude || !exclude->contains(id)) out.push_back(id);
  return out;
}

inline std::vector<std::string> draw(const std::vector<std::string>& from, std::size_t k, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i : sample_indices(from.size(), k, rng)) out.push_back(from[i]);
  return out;
}

}  // namespace sampling_detail

/// Hashtag-only weak labels: n_pos supportive-side tweets as positives and
/// n_neg not-supportive-side tweets as negatives, drawn uniformly.
inline WeakDataset build_hashtag_baseline(const CorpusPartition& part, const TextIndex& texts, std::size_t n_pos,
                                          std::size_t n_neg, std::uint64_t seed, const IdSet* exclude = nullptr) {
  using namespace sampling_detail;
  if (n_pos == 0 || n_neg == 0) throw ConfigError("hashtag baseline needs positive n_pos and n_neg");
  const auto sup = pool(part.supportive, exclude);
  const auto non = pool(part.not_supportive, exclude);
  if (sup.size() < n_pos)
    throw InsufficientDataError("supportive side has " + std::to_string(sup.size()) + " tweets; " +
                                std::to_string(n_pos) + " positives requested");
  if (non.size() < n_neg)
    throw InsufficientDataError("not-supportive side has " + std::to_string(non.size()) + " tweets; " +
                                std::to_string(n_neg) + " negatives requested");

  WeakDataset ds;
  ds.kind = "hashtag";
  ds.config = json{{"n_pos", n_pos}, {"n_neg", n_neg}, {"seed", seed}, {"exclude_eval", exclude != nullptr}};
  for (const auto& id : draw(sup, n_pos, derive_seed(seed, 1)))
    ds.examples.push_back({id, text_of(texts, id), Label::Supportive, Provenance::HashtagPositive, "supportive"});
  for (const auto& id : draw(non, n_neg, derive_seed(seed, 2)))
    ds.examples.push_back({id, text_of(texts, id), Label::NotSupportive, Provenance::HashtagNegative, "not-supportive"});
  return ds;
}

/// n tweets drawn uniformly without replacement from both labeled sides, in
/// draw order and unlabeled, ready for annotation.
inline WeakDataset build_eval_sample(const CorpusPartition& part, const TextIndex& texts, std::size_t n,
                                     std::uint64_t seed) {
  using namespace sampling_detail;
  if (n == 0) throw ConfigError("evaluation sample size must be positive");
  const auto all = pool(part.labeled_union(), nullptr);
  if (all.size() < n)
    throw InsufficientDataError("labeled sides hold " + std::to_string(all.size()) + " tweets; evaluation sample needs " +
                                std::to_string(n));
  WeakDataset ds;
  ds.kind = "eval";
  ds.config = json{{"n", n}, {"seed", seed}};
  for (const auto& id : draw(all, n, derive_seed(seed, 3)))
    ds.examples.push_back({id, text_of(texts, id), std::nullopt, Provenance::Gold, ""});
  return ds;
}

}  // namespace supportive
