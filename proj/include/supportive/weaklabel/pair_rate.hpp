#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supportive/corpus/partition.hpp"
#include "supportive/error.hpp"
#include "supportive/scoring/score_table.hpp"
#include "supportive/util/parallel.hpp"
#include "supportive/util/random.hpp"
#include "supportive/util/stats.hpp"

namespace supportive {

/// Fraction of random (supportive, not-supportive) pairs in which the
/// supportive tweet scores strictly higher.
struct PairRate {
  double rate = 0.0;
  std::uint64_t wins = 0;
  std::uint64_t n_pairs = 0;
  std::uint64_t seed = 0;
  std::string scorer;
};

inline constexpr std::size_t kPairChunk = 4096;

/// Scores-only core: pairs drawn iid with replacement; chunk c uses its own
/// derived stream, so the result does not depend on `jobs`.
inline std::uint64_t count_pair_wins(const std::vector<double>& xs, const std::vector<double>& ys, std::uint64_t n_pairs,
                                     std::uint64_t seed, std::size_t jobs = 1) {
  if (xs.empty() || ys.empty()) throw InsufficientDataError("pairwise rate needs tweets on both sides");
  const std::size_t chunks = (n_pairs + kPairChunk - 1) / kPairChunk;
  std::vector<std::uint64_t> wins(chunks, 0);
  parallel_chunks(n_pairs, kPairChunk, jobs, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Rng rng = make_rng(derive_seed(seed, c));
    std::uint64_t w = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double x = xs[uniform_below(rng, xs.size())];
      const double y = ys[uniform_below(rng, ys.size())];
      w += x > y;
    }
    wins[c] = w;
  });
  std::uint64_t total = 0;
  for (auto w : wins) total += w;
  return total;
}

inline PairRate pairwise_rate(const ScoreTable& table, const CorpusPartition& part, const std::string& scorer,
                              std::uint64_t n_pairs, std::uint64_t seed, std::size_t jobs = 1) {
  if (n_pairs == 0) throw ConfigError("n_pairs must be positive");
  const std::size_t s = table.require_scorer(scorer);
  auto scores = [&](const IdSet& ids) {
    std::vector<double> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(table.at(id, s));
    return out;
  };
  if (part.supportive.empty() || part.not_supportive.empty())
    throw InsufficientDataError("pairwise rate needs tweets on both sides (supportive " +
                                std::to_string(part.supportive.size()) + ", not-supportive " +
                                std::to_string(part.not_supportive.size()) + ")");
  PairRate r;
  r.wins = count_pair_wins(scores(part.supportive), scores(part.not_supportive), n_pairs, seed, jobs);
  r.n_pairs = n_pairs;
  r.seed = seed;
  r.scorer = scorer;
  r.rate = static_cast<double>(r.wins) / static_cast<double>(n_pairs);
  return r;
}

struct RepeatedRate {
  std::vector<PairRate> runs;
  MeanStd summary;  // sample standard deviation across runs
};

/// `runs` executions with seeds base_seed, base_seed + 1, ...
inline RepeatedRate repeated_rate(const ScoreTable& table, const CorpusPartition& part, const std::string& scorer,
                                  std::uint64_t n_pairs, std::uint64_t base_seed, std::size_t runs, std::size_t jobs = 1) {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  RepeatedRate out;
  std::vector<double> rates;
  for (std::size_t i = 0; i < runs; ++i) {
    out.runs.push_back(pairwise_rate(table, part, scorer, n_pairs, base_seed + i, jobs));
    rates.push_back(out.runs.back().rate);
  }
  out.summary = summarize_runs(rates);
  return out;
}

}  // namespace supportive
