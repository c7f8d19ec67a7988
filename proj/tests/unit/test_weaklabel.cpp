#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "supportive/weaklabel/dataset.hpp"
#include "supportive/weaklabel/informed.hpp"
#include "supportive/weaklabel/pair_rate.hpp"
#include "supportive/weaklabel/sampling.hpp"
#include "support.hpp"

using namespace supportive;
using testing_support::TempDir;

namespace {

// n supportive ("s*") and m not-supportive ("n*") tweets with random hope and
// empathy scores; `dupe_every` > 0 makes every k-th supportive text repeat.
struct World {
  CorpusPartition part;
  TextIndex texts;
  ScoreTable table{{"hope", "empathy"}};
};

World make_world(std::size_t n, std::size_t m, std::uint64_t seed, std::size_t dupe_every = 0) {
  World w;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto add = [&](const std::string& id, const std::string& text, IdSet& side) {
    side.insert(id);
    w.texts[id] = CleanText::from_normalized(text);
    w.table.set(id, 0, u(rng));
    w.table.set(id, 1, u(rng));
  };
  for (std::size_t i = 0; i < n; ++i) {
    const bool dupe = dupe_every && i % dupe_every == 1;
    add("s" + std::to_string(i), dupe ? "shared text" : "supportive text " + std::to_string(i), w.part.supportive);
  }
  for (std::size_t i = 0; i < m; ++i) add("n" + std::to_string(i), "other text " + std::to_string(i), w.part.not_supportive);
  return w;
}

std::size_t rank_position(const std::vector<std::string>& ranked, const std::string& id) {
  return static_cast<std::size_t>(std::find(ranked.begin(), ranked.end(), id) - ranked.begin());
}

}  // namespace

// ---------------------------------------------------------------- informed

TEST(Informed, HandCase) {
  World w;
  w.table = ScoreTable({"hope", "empathy"});
  auto put = [&](const std::string& id, double h, double e, IdSet& side) {
    side.insert(id);
    w.texts[id] = CleanText::from_normalized("text of " + id);
    w.table.set(id, 0, h);
    w.table.set(id, 1, e);
  };
  put("a", 0.9, 0.1, w.part.supportive);
  put("b", 0.8, 0.2, w.part.supportive);
  put("c", 0.1, 0.9, w.part.supportive);
  put("d", 0.2, 0.3, w.part.supportive);
  for (int i = 0; i < 10; ++i) put("n" + std::to_string(i), 0.1 * i, 0.05 * i, w.part.not_supportive);
  InformedConfig cfg;
  cfg.top_k = 2;
  cfg.neg_per_list = 3;
  const auto r = build_informed(w.table, w.part, w.texts, cfg);
  // top-2 by hope {a, b}, by empathy {c, d}.
  std::set<std::string> pos;
  for (const auto& e : r.dataset.examples)
    if (e.label == Label::Supportive) pos.insert(e.id);
  EXPECT_EQ(pos, (std::set<std::string>{"a", "b", "c", "d"}));
  EXPECT_EQ(r.stats.positive_text_dupes, 0u);
}

TEST(Informed, InvariantsOnRandomWorld) {
  const auto w = make_world(400, 300, 1);
  InformedConfig cfg;
  cfg.top_k = 100;
  cfg.neg_per_list = 60;
  cfg.seed = 4;
  const auto r = build_informed(w.table, w.part, w.texts, cfg);

  const auto hope_non = rank(w.table, "hope", w.part.not_supportive);
  const auto emp_non = rank(w.table, "empathy", w.part.not_supportive);
  // Oracle for the bottom boundary: ranks beyond ceil((1 - 0.8) * n).
  const std::size_t first_allowed = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(hope_non.size())));

  std::size_t pos = 0;
  std::set<std::string> pos_texts, neg_texts, ids;
  for (const auto& e : r.dataset.examples) {
    EXPECT_TRUE(ids.insert(e.id).second) << e.id;
    if (e.label == Label::Supportive) {
      ++pos;
      EXPECT_TRUE(w.part.supportive.contains(e.id));
      EXPECT_TRUE(pos_texts.insert(e.text.text).second);
    } else {
      EXPECT_TRUE(w.part.not_supportive.contains(e.id));
      neg_texts.insert(e.text.text);
      // Every list the negative was drawn from places it in the bottom part.
      if (e.origin.find("hope") != std::string::npos) EXPECT_GE(rank_position(hope_non, e.id), first_allowed);
      if (e.origin.find("empathy") != std::string::npos) EXPECT_GE(rank_position(emp_non, e.id), first_allowed);
    }
  }
  for (const auto& t : neg_texts) EXPECT_FALSE(pos_texts.contains(t));
  EXPECT_LE(pos, 2 * cfg.top_k);
  // Equality iff no duplicates across or within the two top lists.
  EXPECT_EQ(pos == 2 * cfg.top_k, r.stats.positive_text_dupes == 0);
  EXPECT_EQ(pos + r.stats.positive_text_dupes, 2 * cfg.top_k);
}

TEST(Informed, TextDuplicatesDropped) {
  const auto w = make_world(400, 300, 2, 5);
  InformedConfig cfg;
  cfg.top_k = 150;
  cfg.neg_per_list = 50;
  const auto r = build_informed(w.table, w.part, w.texts, cfg);
  std::size_t shared = 0, pos = 0;
  for (const auto& e : r.dataset.examples) {
    shared += e.text.text == "shared text";
    pos += e.label == Label::Supportive;
  }
  EXPECT_EQ(shared, 1u);
  EXPECT_LT(pos, 2 * cfg.top_k);
  EXPECT_GT(r.stats.positive_text_dupes, 0u);
}

TEST(Informed, DeterministicFile) {
  TempDir dir("informed");
  const auto w = make_world(300, 300, 3);
  InformedConfig cfg;
  cfg.top_k = 50;
  cfg.neg_per_list = 40;
  cfg.seed = 12;
  write_dataset(dir / "a.jsonl", build_informed(w.table, w.part, w.texts, cfg).dataset);
  write_dataset(dir / "b.jsonl", build_informed(w.table, w.part, w.texts, cfg).dataset);
  EXPECT_EQ(testing_support::slurp(dir / "a.jsonl"), testing_support::slurp(dir / "b.jsonl"));
  cfg.seed = 13;
  write_dataset(dir / "c.jsonl", build_informed(w.table, w.part, w.texts, cfg).dataset);
  EXPECT_NE(testing_support::slurp(dir / "a.jsonl"), testing_support::slurp(dir / "c.jsonl"));
}

TEST(Informed, ExclusionKeepsEvalOut) {
  const auto w = make_world(300, 300, 5);
  const auto eval = build_eval_sample(w.part, w.texts, 100, 1);
  const auto excluded = eval.ids();
  InformedConfig cfg;
  cfg.top_k = 80;
  cfg.neg_per_list = 40;
  const auto r = build_informed(w.table, w.part, w.texts, cfg, &excluded);
  for (const auto& e : r.dataset.examples) EXPECT_FALSE(excluded.contains(e.id)) << e.id;
  EXPECT_EQ(r.stats.excluded, 100u);
}

TEST(Informed, InsufficientDataNamesShortfall) {
  const auto w = make_world(30, 30, 6);
  InformedConfig cfg;
  cfg.top_k = 40;
  try {
    build_informed(w.table, w.part, w.texts, cfg);
    FAIL();
  } catch (const InsufficientDataError& e) {
    EXPECT_NE(std::string(e.what()).find("short by 10"), std::string::npos) << e.what();
  }
  cfg.top_k = 10;
  cfg.neg_per_list = 25;  // bottom 80% of 30 is 24
  EXPECT_THROW(build_informed(w.table, w.part, w.texts, cfg), InsufficientDataError);
}

TEST(Informed, MissingScorer) {
  auto w = make_world(50, 50, 7);
  InformedConfig cfg;
  cfg.top_k = 5;
  cfg.neg_per_list = 5;
  cfg.empathy_scorer = "distress";
  EXPECT_THROW(build_informed(w.table, w.part, w.texts, cfg), Error);
}

// ---------------------------------------------------------------- sampling

TEST(HashtagBaseline, SizesAndSides) {
  const auto w = make_world(200, 200, 8);
  const auto a = build_hashtag_baseline(w.part, w.texts, 70, 30, 1);
  EXPECT_EQ(a.count(Label::Supportive), 70u);
  EXPECT_EQ(a.count(Label::NotSupportive), 30u);
  for (const auto& e : a.examples)
    EXPECT_TRUE(e.label == Label::Supportive ? w.part.supportive.contains(e.id) : w.part.not_supportive.contains(e.id));
  const auto b = build_hashtag_baseline(w.part, w.texts, 70, 30, 2);
  EXPECT_EQ(b.examples.size(), a.examples.size());
  EXPECT_NE(b.ids(), a.ids());
  EXPECT_EQ(build_hashtag_baseline(w.part, w.texts, 70, 30, 1).fingerprint(), a.fingerprint());
}

TEST(HashtagBaseline, Degenerate) {
  const auto w = make_world(20, 20, 9);
  EXPECT_THROW(build_hashtag_baseline(w.part, w.texts, 0, 5, 1), ConfigError);
  EXPECT_THROW(build_hashtag_baseline(w.part, w.texts, 21, 5, 1), InsufficientDataError);
}

TEST(EvalSample, WholeUnionWhenNEqualsSize) {
  const auto w = make_world(20, 15, 10);
  const auto e = build_eval_sample(w.part, w.texts, 35, 1);
  EXPECT_EQ(e.ids(), w.part.labeled_union());
  for (const auto& x : e.examples) EXPECT_FALSE(x.label.has_value());
  EXPECT_THROW(build_eval_sample(w.part, w.texts, 36, 1), InsufficientDataError);
}

TEST(Dataset, RoundTrip) {
  TempDir dir("dataset");
  const auto w = make_world(40, 40, 11);
  const auto ds = build_hashtag_baseline(w.part, w.texts, 10, 10, 3);
  write_dataset(dir / "d.jsonl", ds);
  const auto back = read_dataset(dir / "d.jsonl");
  EXPECT_EQ(back.fingerprint(), ds.fingerprint());
  // Every row carries id, text, label, provenance and the config fingerprint.
  std::size_t rows = 0;
  read_jsonl(dir / "d.jsonl", [&](const json& j, std::size_t) {
    ++rows;
    for (const char* k : {"id", "text", "label", "provenance", "config_fingerprint"}) EXPECT_TRUE(j.contains(k)) << k;
  });
  EXPECT_EQ(rows, 20u);
}

// ---------------------------------------------------------------- pair rate

TEST(PairRate, OracleScorerIsOne) {
  auto w = make_world(50, 70, 12);
  for (const auto& id : w.part.supportive) w.table.set(id, 0, 1.0);
  for (const auto& id : w.part.not_supportive) w.table.set(id, 0, 0.0);
  const auto r = pairwise_rate(w.table, w.part, "hope", 10000, 1);
  EXPECT_EQ(r.rate, 1.0);
  EXPECT_EQ(r.wins, r.n_pairs);
  const auto rr = repeated_rate(w.table, w.part, "hope", 10000, 1, 5);
  EXPECT_EQ(rr.summary.std, 0.0);
}

TEST(PairRate, ConstantScoresAreZero) {
  auto w = make_world(50, 70, 13);
  for (const auto& [id, _] : w.table.rows()) w.table.set(id, 0, 0.5);
  EXPECT_EQ(pairwise_rate(w.table, w.part, "hope", 10000, 1).rate, 0.0);
}

TEST(PairRate, RandomScoresNearHalf) {
  const auto w = make_world(2000, 2000, 14);
  const double n = 100000;
  const double sigma = std::sqrt(0.25 / n);
  const auto rr = repeated_rate(w.table, w.part, "hope", 100000, 7, 5, 4);
  // Finite-population oracle: exact fraction of strict wins over all pairs.
  std::vector<double> xs, ys;
  for (const auto& id : w.part.supportive) xs.push_back(w.table.at(id, 0));
  for (const auto& id : w.part.not_supportive) ys.push_back(w.table.at(id, 0));
  std::sort(ys.begin(), ys.end());
  double wins = 0;
  for (double x : xs) wins += static_cast<double>(std::lower_bound(ys.begin(), ys.end(), x) - ys.begin());
  const double exact = wins / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
  for (const auto& r : rr.runs) EXPECT_NEAR(r.rate, exact, 3 * sigma);
  EXPECT_NEAR(exact, 0.5, 0.02);
}

TEST(PairRate, IndependentOfJobs) {
  const auto w = make_world(300, 300, 15);
  EXPECT_EQ(pairwise_rate(w.table, w.part, "empathy", 50000, 3, 1).wins,
            pairwise_rate(w.table, w.part, "empathy", 50000, 3, 8).wins);
}

TEST(PairRate, SwappedSidesCountStrictLosses) {
  auto w = make_world(100, 100, 16);
  // Coarse scores create ties, so wins + losses < all pairs.
  for (const auto& [id, ps] : w.table.rows()) w.table.set(id, 0, std::round(ps[0] * 4) / 4);
  CorpusPartition swapped;
  swapped.supportive = w.part.not_supportive;
  swapped.not_supportive = w.part.supportive;
  // Oracle: enumerate all pairs.
  double wins = 0, losses = 0, total = 0;
  for (const auto& x : w.part.supportive)
    for (const auto& y : w.part.not_supportive) {
      wins += w.table.at(x, 0) > w.table.at(y, 0);
      losses += w.table.at(x, 0) < w.table.at(y, 0);
      ++total;
    }
  ASSERT_LT(wins + losses, total);
  const std::uint64_t n = 100000;
  const double tol = 3 * std::sqrt(0.25 / static_cast<double>(n));
  EXPECT_NEAR(pairwise_rate(w.table, w.part, "hope", n, 9).rate, wins / total, tol);
  EXPECT_NEAR(pairwise_rate(w.table, swapped, "hope", n, 9).rate, losses / total, tol);
}

TEST(PairRate, Errors) {
  const auto w = make_world(10, 10, 17);
  CorpusPartition empty_side;
  empty_side.supportive = w.part.supportive;
  EXPECT_THROW(pairwise_rate(w.table, empty_side, "hope", 10, 1), InsufficientDataError);
  EXPECT_THROW(repeated_rate(w.table, w.part, "hope", 10, 1, 0), ConfigError);
}
