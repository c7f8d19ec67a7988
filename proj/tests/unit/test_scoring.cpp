#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "supportive/linear/scorer_training.hpp"
#include "supportive/scoring/hub.hpp"
#include "supportive/scoring/score_table.hpp"
#include "supportive/scoring/scorer.hpp"
#include "supportive/synth/generator.hpp"
#include "support.hpp"

using namespace supportive;
using testing_support::TempDir;

namespace {

std::vector<TextItem> items(std::size_t n, const std::string& prefix = "t") {
  std::vector<TextItem> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({prefix + std::to_string(i), CleanText::from_normalized("text number " + std::to_string(i) + " here")});
  return out;
}

std::unique_ptr<ExternalScorer> echo(std::vector<std::string> args, std::size_t batch = 256, int timeout_ms = 5000,
                                     std::size_t workers = 1) {
  ExternalScorerOptions opt;
  opt.command = {SUPPORTIVE_ECHO_SCORER};
  opt.command.insert(opt.command.end(), args.begin(), args.end());
  opt.batch_size = batch;
  opt.timeout = std::chrono::milliseconds(timeout_ms);
  opt.workers = workers;
  return std::make_unique<ExternalScorer>("echo", opt);
}

ScoreTable score_with(std::unique_ptr<Scorer> s, std::span<const TextItem> xs, std::size_t jobs = 1) {
  ScorerHub hub;
  hub.add("echo", std::move(s));
  return hub.score_corpus(xs, {jobs, nullptr});
}

template <class E>
std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return "<no exception>";
}

}  // namespace

// ---------------------------------------------------------------- builtin

TEST(Hub, ConstantScorer) {
  ScorerHub hub;
  hub.add("c", BuiltinScorer::constant(0.5));
  const auto xs = items(3);
  const auto t = hub.score_corpus(xs);
  ASSERT_EQ(t.size(), 3u);
  for (const auto& x : xs) EXPECT_NEAR(t.at(x.id, 0), 0.5, 1e-15);
}

TEST(Hub, DuplicateNamesRejected) {
  ScorerHub hub;
  hub.add("c", BuiltinScorer::constant(0.5));
  EXPECT_THROW(hub.add("c", BuiltinScorer::constant(0.4)), ConfigError);
}

TEST(Hub, BuiltinMatchesDirectPrediction) {
  synth::SeedConfig sc;
  sc.positives = 200;
  sc.negatives = 200;
  const auto trained = train_scorer(synth::hope_seed_dataset(sc), {});
  synth::SynthConfig cfg;
  cfg.n_tweets = 300;
  std::vector<TextItem> xs;
  for (const auto& t : synth::generate_corpus(cfg)) xs.push_back({t.record.id, clean(t.record.raw_text)});

  ScorerHub hub;
  hub.add("hope", std::make_unique<BuiltinScorer>(trained.scorer));
  hub.add("half", BuiltinScorer::constant(0.25));
  const auto table = hub.score_corpus(xs, {4, nullptr});
  EXPECT_TRUE(table.complete());
  EXPECT_EQ(table.size() * table.scorers().size(), xs.size() * 2);
  for (const auto& x : xs) {
    const double direct = predict_proba(trained.scorer.model, vectorize(x.text, trained.scorer.vocabulary));
    EXPECT_EQ(table.at(x.id, 0), direct) << x.id;
  }
  // Re-scoring the same input yields the same table.
  EXPECT_EQ(hub.score_corpus(xs, {1, nullptr}).fingerprint(), table.fingerprint());
}

namespace {
class CountingScorer final : public Scorer {
 public:
  explicit CountingScorer(int& calls) : calls_(calls) {}
  std::string version() const override { return "counting:1"; }
  std::vector<double> score(std::span<const TextItem> xs, std::size_t) override {
    ++calls_;
    return std::vector<double>(xs.size(), 0.125);
  }

 private:
  int& calls_;
};
}  // namespace

TEST(Hub, CacheHitSkipsScorer) {
  TempDir dir("cache");
  const ScoreCache cache(dir.path());
  const auto xs = items(20);
  int calls = 0;
  for (int round = 0; round < 3; ++round) {
    ScorerHub hub;
    hub.add("count", std::make_unique<CountingScorer>(calls));
    const auto t = hub.score_corpus(xs, {1, &cache});
    EXPECT_EQ(t.at("t7", 0), 0.125);
  }
  EXPECT_EQ(calls, 1);
  // A different corpus misses.
  ScorerHub hub;
  hub.add("count", std::make_unique<CountingScorer>(calls));
  const auto other = items(5, "u");
  hub.score_corpus(other, {1, &cache});
  EXPECT_EQ(calls, 2);
}

// ---------------------------------------------------------------- rank

TEST(Rank, TwoElements) {
  ScoreTable t({"s"});
  t.set("a", 0, 0.9);
  t.set("b", 0, 0.1);
  EXPECT_EQ(rank(t, "s", {"a", "b"}), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(rank(t, "s", {"a", "b"}, Direction::Ascending), (std::vector<std::string>{"b", "a"}));
}

TEST(Rank, TiesByAscendingId) {
  ScoreTable t({"s"});
  for (const char* id : {"c", "a", "b"}) t.set(id, 0, 0.5);
  EXPECT_EQ(rank(t, "s", {"c", "a", "b"}), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Rank, UnknownScorer) {
  ScoreTable t({"s"});
  t.set("a", 0, 0.5);
  EXPECT_THROW(rank(t, "nope", {"a"}), Error);
}

TEST(Rank, MatchesSortOracle) {
  std::mt19937_64 rng(17);
  ScoreTable t({"s"});
  IdSet ids;
  std::vector<std::pair<double, std::string>> oracle;
  for (int i = 0; i < 1000; ++i) {
    const std::string id = "id" + std::to_string(rng() % 100000) + "_" + std::to_string(i);
    const double p = static_cast<double>(rng() % 50) / 49.0;  // plenty of ties
    t.set(id, 0, p);
    ids.insert(id);
    oracle.emplace_back(-p, id);
  }
  std::sort(oracle.begin(), oracle.end());
  std::vector<std::string> expected;
  for (const auto& [p, id] : oracle) expected.push_back(id);
  EXPECT_EQ(rank(t, "s", ids), expected);
}

TEST(ScoreTableIo, RoundTrip) {
  TempDir dir("table");
  ScoreTable t({"hope", "empathy"}, "abc");
  t.set("x", 0, 0.25);
  t.set("x", 1, 0.75);
  t.set("y", 0, 1.0 / 3.0);
  t.set("y", 1, 0.0);
  write_score_table(dir / "s.jsonl", t);
  const auto back = read_score_table(dir / "s.jsonl");
  EXPECT_EQ(back.fingerprint(), t.fingerprint());
  EXPECT_EQ(back.at("y", 0), 1.0 / 3.0);
}

// ---------------------------------------------------------------- external

TEST(External, ConstantRoundTrip) {
  const auto xs = items(10);
  const auto t = score_with(echo({"--p", "0.9"}), xs);
  for (const auto& x : xs) EXPECT_EQ(t.at(x.id, 0), 0.9);
}

TEST(External, ManyBatchesAndWorkers) {
  const auto xs = items(1000);
  const auto single = score_with(echo({"--hash"}, 64), xs, 1);
  const auto multi = score_with(echo({"--hash"}, 64, 5000, 4), xs, 4);
  EXPECT_EQ(single.fingerprint(), multi.fingerprint());
  std::set<double> distinct;
  for (const auto& x : xs) distinct.insert(single.at(x.id, 0));
  EXPECT_GT(distinct.size(), 100u);
}

TEST(External, OutOfOrderResponsesAccepted) {
  const auto xs = items(50);
  const auto ordered = score_with(echo({"--hash"}, 50), xs);
  const auto shuffled = score_with(echo({"--hash", "--mode", "shuffle"}, 50), xs);
  EXPECT_EQ(ordered.fingerprint(), shuffled.fingerprint());
}

TEST(External, HandshakeName) {
  auto s = echo({"--name", "stub"});
  const auto xs = items(1);
  s->score(xs, 1);
  EXPECT_EQ(s->handshake_name(), "stub");
}

TEST(External, WrongProtocolVersion) {
  const auto xs = items(3);
  EXPECT_THROW(score_with(echo({"--protocol", "2"}), xs), ProtocolError);
}

TEST(External, CrashNamesScorerAndId) {
  const auto xs = items(10);
  const auto msg = message_of<ScoringError>([&] { score_with(echo({"--mode", "crash", "--after", "4"}), xs); });
  EXPECT_NE(msg.find("echo"), std::string::npos) << msg;
  EXPECT_NE(msg.find("t4"), std::string::npos) << msg;
}

TEST(External, OutOfRangeProbabilityIsProtocolViolation) {
  const auto xs = items(5);
  const auto msg = message_of<ProtocolError>([&] { score_with(echo({"--mode", "bad-p", "--after", "2"}), xs); });
  EXPECT_NE(msg.find("t2"), std::string::npos) << msg;
}

TEST(External, ErrorResponse) {
  const auto xs = items(5);
  const auto msg = message_of<ScoringError>([&] { score_with(echo({"--mode", "error", "--after", "1"}), xs); });
  EXPECT_NE(msg.find("t1"), std::string::npos) << msg;
}

TEST(External, TimeoutNamesPendingId) {
  const auto xs = items(4);
  const auto msg = message_of<ScoringError>(
      [&] { score_with(echo({"--mode", "sleep", "--sleep-ms", "2000", "--after", "2"}, 256, 300), xs, 1); });
  EXPECT_NE(msg.find("timed out"), std::string::npos) << msg;
  EXPECT_NE(msg.find("t2"), std::string::npos) << msg;
}

TEST(External, DroppedResponseTimesOut) {
  const auto xs = items(4);
  const auto msg = message_of<ScoringError>([&] { score_with(echo({"--mode", "drop", "--after", "3"}, 256, 300), xs); });
  EXPECT_NE(msg.find("t3"), std::string::npos) << msg;
}

TEST(External, DuplicateResponseRejected) {
  const auto xs = items(4);
  EXPECT_THROW(score_with(echo({"--mode", "duplicate"}), xs), ProtocolError);
}

TEST(External, MissingExecutable) {
  ExternalScorerOptions opt;
  opt.command = {"/nonexistent/scorer"};
  const auto xs = items(2);
  EXPECT_THROW(score_with(std::make_unique<ExternalScorer>("ghost", opt), xs), ScoringError);
}

TEST(External, MalformedRequestGetsLineNumberedError) {
  Subprocess proc({SUPPORTIVE_ECHO_SCORER});
  ASSERT_TRUE(proc.write_all("{\"op\":\"hello\"}\nnot json\n{\"id\":\"a\",\"text\":\"x\"}\n"));
  std::string line;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  ASSERT_EQ(proc.read_line(line, deadline), Subprocess::ReadStatus::Line);
  EXPECT_EQ(json::parse(line)["protocol"], 1);
  ASSERT_EQ(proc.read_line(line, deadline), Subprocess::ReadStatus::Line);
  const auto err = json::parse(line);
  EXPECT_TRUE(err.contains("error"));
  EXPECT_EQ(err["line"], 2);
  ASSERT_EQ(proc.read_line(line, deadline), Subprocess::ReadStatus::Line);
  EXPECT_EQ(json::parse(line)["id"], "a");
}
