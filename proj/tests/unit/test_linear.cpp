#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "supportive/linear/metrics.hpp"
#include "supportive/linear/model.hpp"
#include "supportive/linear/model_io.hpp"
#include "supportive/linear/scorer_training.hpp"
#include "supportive/linear/sparse.hpp"
#include "supportive/linear/vocabulary.hpp"
#include "supportive/synth/generator.hpp"
#include "support.hpp"

using namespace supportive;

namespace {

std::vector<CleanText> docs(std::initializer_list<const char*> texts) {
  std::vector<CleanText> out;
  for (const char* t : texts) out.push_back(CleanText::from_normalized(t));
  return out;
}

SparseVector dense_to_sparse(const std::vector<double>& xs) {
  SparseVector v;
  v.dim = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] != 0.0) v.entries.emplace_back(static_cast<std::uint32_t>(i), xs[i]);
  return v;
}

// Two features; positives have x0 > x1.
std::vector<LabeledVector> separable_toy() {
  std::vector<LabeledVector> data;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 60; ++i) {
    const double a = u(rng), b = u(rng) * 0.4;
    data.push_back({dense_to_sparse({a + 0.5, b}), true});
    data.push_back({dense_to_sparse({b, a + 0.5}), false});
  }
  return data;
}

}  // namespace

// ---------------------------------------------------------------- vocabulary

TEST(Vocabulary, CountsDocumentFrequency) {
  const auto d = docs({"a b", "a c"});
  const auto v = fit_vocabulary(d, 1);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(v.document_frequency(*v.index_of("a")), 2u);
  EXPECT_EQ(v.n_documents(), 2u);
}

TEST(Vocabulary, MinDfThreshold) {
  const auto d = docs({"a b", "a c"});
  EXPECT_EQ(fit_vocabulary(d, 2).terms(), std::vector<std::string>{"a"});
  EXPECT_THROW(fit_vocabulary(d, 3), DataError);
}

TEST(Vocabulary, RepeatedTermCountsOncePerDocument) {
  const auto d = docs({"a a a", "b"});
  const auto v = fit_vocabulary(d, 1);
  EXPECT_EQ(v.document_frequency(*v.index_of("a")), 1u);
}

TEST(Vocabulary, ReproducibleLayout) {
  synth::SynthConfig cfg;
  cfg.n_tweets = 1000;
  std::vector<CleanText> texts;
  for (const auto& t : synth::generate_corpus(cfg)) texts.push_back(clean(t.record.raw_text));
  const auto a = fit_vocabulary(texts, 1);
  std::reverse(texts.begin(), texts.end());
  const auto b = fit_vocabulary(texts, 1);
  EXPECT_EQ(a.terms(), b.terms());
  EXPECT_EQ(a.document_frequencies(), b.document_frequencies());
  EXPECT_TRUE(std::is_sorted(a.terms().begin(), a.terms().end()));
}

// ---------------------------------------------------------------- vectorize

TEST(Vectorize, HandComputedWeights) {
  const auto v = fit_vocabulary(docs({"a b", "a c"}), 1);
  const auto x = vectorize(CleanText::from_normalized("a a b"), v);
  // N = 2; df(a) = 2, df(b) = 1.  idf = ln((1+N)/(1+df)) + 1.
  const double wa = 2.0 * (std::log(3.0 / 3.0) + 1.0);
  const double wb = 1.0 * (std::log(3.0 / 2.0) + 1.0);
  const double n = std::sqrt(wa * wa + wb * wb);
  ASSERT_EQ(x.entries.size(), 2u);
  EXPECT_EQ(x.entries[0].first, 0u);
  EXPECT_EQ(x.entries[1].first, 1u);
  EXPECT_NEAR(x.entries[0].second, wa / n, 1e-12);
  EXPECT_NEAR(x.entries[1].second, wb / n, 1e-12);
}

TEST(Vectorize, TermInEveryDocumentHasUnitIdf) {
  const auto v = fit_vocabulary(docs({"a b", "a c", "a"}), 1);
  EXPECT_DOUBLE_EQ(v.idf(*v.index_of("a")), 1.0);
}

TEST(Vectorize, EmptyAndOutOfVocabularyGiveZero) {
  const auto v = fit_vocabulary(docs({"a b"}), 1);
  EXPECT_TRUE(vectorize(CleanText::from_normalized(""), v).empty());
  EXPECT_TRUE(vectorize(CleanText::from_normalized("zzz qqq"), v).empty());
}

TEST(Vectorize, UnitNormAndIncreasingIndices) {
  synth::SynthConfig cfg;
  cfg.n_tweets = 400;
  std::vector<CleanText> texts;
  for (const auto& t : synth::generate_corpus(cfg)) texts.push_back(clean(t.record.raw_text));
  const auto v = fit_vocabulary(texts, 1);
  for (const auto& t : texts) {
    const auto x = vectorize(t, v);
    if (x.empty()) continue;
    EXPECT_NEAR(x.norm(), 1.0, 1e-9);
    for (std::size_t i = 1; i < x.entries.size(); ++i) EXPECT_LT(x.entries[i - 1].first, x.entries[i].first);
  }
}

// ---------------------------------------------------------------- training

TEST(Train, SeparableToyReachesFullAccuracy) {
  const auto data = separable_toy();
  for (auto kind : {LossKind::Logistic, LossKind::Hinge}) {
    TrainConfig tc;
    tc.epochs = 50;
    const auto m = train(data, kind, 1, tc);
    std::size_t right = 0;
    for (const auto& ex : data) right += predict(m, ex.x) == ex.positive;
    EXPECT_EQ(right, data.size()) << to_string(kind);
  }
}

TEST(Train, DeterministicGivenSeed) {
  const auto data = separable_toy();
  const auto a = train(data, LossKind::Hinge, 9);
  const auto b = train(data, LossKind::Hinge, 9);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  const auto c = train(data, LossKind::Hinge, 10);
  EXPECT_NE(a.weights, c.weights);
}

TEST(Train, SingleClassIsDegenerate) {
  std::vector<LabeledVector> data{{dense_to_sparse({1.0, 0.0}), true}, {dense_to_sparse({0.0, 1.0}), true}};
  EXPECT_THROW(train(data, LossKind::Logistic, 0), DegenerateTrainingError);
}

TEST(Train, LossNonIncreasingAcrossEpochs) {
  const auto data = separable_toy();
  TrainConfig tc;
  tc.learning_rate = 0.05;
  tc.l2 = 1e-3;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t e = 1; e <= 15; ++e) {
    tc.epochs = e;
    const double l = regularized_loss(train(data, LossKind::Logistic, 4, tc), data);
    EXPECT_LE(l, prev + 1e-12) << "epoch " << e;
    prev = l;
  }
}

TEST(Train, EmpathyFormatBeatsMajorityRate) {
  synth::SeedConfig sc;  // 916 / 905
  const auto examples = synth::empathy_seed_dataset(sc);
  std::size_t pos = 0;
  for (const auto& e : examples) pos += e.positive;
  EXPECT_EQ(pos, 916u);
  EXPECT_EQ(examples.size() - pos, 905u);
  ScorerTrainingOptions opt;
  opt.seed = 2;
  const auto r = train_scorer(examples, opt);
  EXPECT_EQ(r.n_train + r.n_test, examples.size());
  // Oracle: majority rate recomputed from the held-out label counts.
  const double majority = static_cast<double>(std::max(r.held_out.tp + r.held_out.fn, r.held_out.fp + r.held_out.tn)) /
                          static_cast<double>(r.held_out.total());
  EXPECT_DOUBLE_EQ(r.majority_rate, majority);
  EXPECT_GT(r.held_out_accuracy, majority);
}

// ---------------------------------------------------------------- prediction

TEST(Predict, ZeroModelGivesHalf) {
  LinearModel m;
  m.weights = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(predict_proba(m, dense_to_sparse({0.3, 0.7})), 0.5);
  EXPECT_TRUE(predict(m, dense_to_sparse({0.3, 0.7})));  // ties are positive
}

TEST(Predict, LargeMarginSaturates) {
  LinearModel m;
  m.weights = {1.0};
  m.bias = 1e6;
  EXPECT_DOUBLE_EQ(predict_proba(m, dense_to_sparse({1.0})), 1.0);
  m.bias = -1e6;
  EXPECT_DOUBLE_EQ(predict_proba(m, dense_to_sparse({1.0})), 0.0);
}

TEST(Predict, DimensionMismatch) {
  LinearModel m;
  m.weights = {1.0, 2.0};
  EXPECT_THROW(predict_proba(m, dense_to_sparse({1.0, 2.0, 3.0})), DimensionMismatchError);
}

TEST(Predict, RankingMatchesMarginSort) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  LinearModel m;
  for (int j = 0; j < 20; ++j) m.weights.push_back(g(rng));
  m.bias = 0.3;
  std::vector<SparseVector> xs;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> d(20);
    for (auto& v : d) v = g(rng);
    xs.push_back(dense_to_sparse(d));
  }
  // Oracle: raw margins computed by an explicit dense loop.
  auto margin = [&](const SparseVector& v) {
    double s = m.bias;
    for (const auto& [i, w] : v.entries) s += m.weights[i] * w;
    return s;
  };
  std::vector<std::size_t> by_margin(xs.size()), by_proba(xs.size());
  std::iota(by_margin.begin(), by_margin.end(), std::size_t{0});
  by_proba = by_margin;
  std::stable_sort(by_margin.begin(), by_margin.end(), [&](auto a, auto b) { return margin(xs[a]) > margin(xs[b]); });
  std::stable_sort(by_proba.begin(), by_proba.end(),
                   [&](auto a, auto b) { return predict_proba(m, xs[a]) > predict_proba(m, xs[b]); });
  EXPECT_EQ(by_margin, by_proba);

  // Positive rescaling of (w, b) leaves the argmax unchanged.
  LinearModel scaled = m;
  for (auto& w : scaled.weights) w *= 3.7;
  scaled.bias *= 3.7;
  auto argmax = [&](const LinearModel& mm) {
    return std::max_element(xs.begin(), xs.end(),
                            [&](const auto& a, const auto& b) { return predict_proba(mm, a) < predict_proba(mm, b); }) -
           xs.begin();
  };
  EXPECT_EQ(argmax(m), argmax(scaled));
}

// ---------------------------------------------------------------- metrics

TEST(Metrics, PerfectPredictions) {
  const std::vector<bool> g{true, false, true, false};
  const auto m = compute_metrics(g, g);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
}

TEST(Metrics, AllPositivePredictor) {
  std::vector<bool> gold(1000, false);
  std::fill(gold.begin(), gold.begin() + 444, true);
  const auto m = compute_metrics(std::vector<bool>(1000, true), gold);
  EXPECT_EQ(m.precision, 0.444);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_NEAR(m.f1, 2 * 0.444 / 1.444, 1e-15);
}

TEST(Metrics, AllNegativePredictor) {
  const auto m = compute_metrics({false, false, false}, {true, false, true});
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
}

TEST(Metrics, LengthMismatch) { EXPECT_THROW(compute_metrics({true}, {true, false}), DataError); }

TEST(Metrics, MatchesConfusionOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    std::vector<bool> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng() % 2;
      g[i] = rng() % 3 == 0;
    }
    // Oracle: 2x2 table by index.
    std::size_t cell[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < n; ++i) ++cell[p[i]][g[i]];
    const double tp = cell[1][1], fp = cell[1][0], fn = cell[0][1];
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    const auto m = compute_metrics(p, g);
    EXPECT_EQ(m.total(), n);
    EXPECT_EQ(m.tp, cell[1][1]);
    EXPECT_EQ(m.tn, cell[0][0]);
    EXPECT_NEAR(m.precision, prec, 1e-12);
    EXPECT_NEAR(m.recall, rec, 1e-12);
    EXPECT_NEAR(m.f1, f1, 1e-12);
  }
}

// ---------------------------------------------------------------- model files

TEST(ModelIo, RoundTripIsExact) {
  const auto d = docs({"good day", "bad day", "good night"});
  ScorerModel sm;
  sm.vocabulary = fit_vocabulary(d, 1);
  std::vector<LabeledVector> data;
  for (std::size_t i = 0; i < d.size(); ++i) data.push_back({vectorize(d[i], sm.vocabulary), i != 1});
  sm.model = train(data, LossKind::Logistic, 3);
  sm.provenance = R"({"command":"test"})";
  std::stringstream buf;
  write_scorer_model(buf, sm);
  const auto back = read_scorer_model(buf);
  EXPECT_EQ(back.vocabulary.terms(), sm.vocabulary.terms());
  EXPECT_EQ(back.model.weights, sm.model.weights);
  EXPECT_EQ(back.model.bias, sm.model.bias);
  EXPECT_EQ(back.model.kind, sm.model.kind);
  EXPECT_EQ(back.model.training_seed, 3u);
  EXPECT_EQ(back.provenance, sm.provenance);
  EXPECT_EQ(model_fingerprint(back), model_fingerprint(sm));
}

TEST(ModelIo, OtherVersionFailsLoudly) {
  std::stringstream buf("supportive-linear-model v2\nprovenance {}\n");
  try {
    read_scorer_model(buf);
    FAIL() << "expected a version error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("v2"), std::string::npos);
  }
}
