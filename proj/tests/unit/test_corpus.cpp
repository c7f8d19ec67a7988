#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "supportive/corpus/corpus.hpp"
#include "supportive/corpus/country.hpp"
#include "supportive/corpus/jaccard.hpp"
#include "supportive/corpus/partition.hpp"
#include "supportive/corpus/text.hpp"
#include "support.hpp"

using namespace supportive;
using testing_support::TempDir;

// ---------------------------------------------------------------- cleaning

TEST(Clean, StripsHashtagsMentionsAndUrls) {
  const auto ct = clean("Prayers for India #IndiaNeedsOxygen @user https://t.co/x");
  EXPECT_EQ(ct.text, "prayers for india");
  EXPECT_EQ(ct.token_count(), 3u);
}

TEST(Clean, EmptyInput) {
  const auto ct = clean("");
  EXPECT_EQ(ct.text, "");
  EXPECT_EQ(ct.token_count(), 0u);
}

TEST(Clean, StripsPunctuation) {
  const auto ct = clean("Get well soon, India!!!");
  EXPECT_EQ(ct.text, "get well soon india");
  EXPECT_EQ(ct.token_count(), 4u);
}

TEST(Clean, RemovesEmojiAndFlags) {
  const auto ct = clean("Stay strong \xF0\x9F\x99\x8F brothers \xF0\x9F\x87\xAE\xF0\x9F\x87\xB3 love");
  EXPECT_EQ(ct.text, "stay strong brothers love");
}

TEST(Clean, WwwUrlAndCollapsedWhitespace) {
  EXPECT_EQ(clean("see   www.example.com/page\tnow").text, "see now");
}

TEST(Clean, TokensMatchText) {
  const auto ct = clean("We stand WITH you, neighbours. #PakistanStandsWithIndia");
  std::string joined;
  for (const auto& t : ct.tokens) joined += (joined.empty() ? "" : " ") + t;
  EXPECT_EQ(joined, ct.text);
}

TEST(Clean, Idempotent) {
  const char* samples[] = {"Prayers for India #IndiaNeedsOxygen @user https://t.co/x",
                           "Get well soon, India!!!",
                           "  mixed   CASE and don't stop... \xF0\x9F\x98\xA2",
                           "#only #tags @and @mentions",
                           "numbers 123 and 4.5 stay?"};
  for (const char* s : samples) {
    const auto once = clean(s);
    EXPECT_EQ(clean(once.text).text, once.text) << s;
  }
}

TEST(LengthFilter, Boundaries) {
  const auto ten = CleanText::from_normalized("a b c d e f g h i j");
  const auto nine = CleanText::from_normalized("a b c d e f g h i");
  EXPECT_TRUE(passes_length_filter(ten, 10));
  EXPECT_FALSE(passes_length_filter(nine, 10));
  EXPECT_TRUE(passes_length_filter(clean(""), 0));
}

// ---------------------------------------------------------------- country

namespace {
TweetRecord with_evidence(std::optional<std::string> geo, std::vector<std::string> flags) {
  TweetRecord r;
  r.id = "x";
  r.geo_country = std::move(geo);
  r.profile_flags = std::move(flags);
  return r;
}
}  // namespace

TEST(Country, GeoOnly) {
  const auto c = infer_country(with_evidence("IN", {}));
  EXPECT_EQ(c.value, Country::India);
  EXPECT_EQ(c.source, CountrySource::Geo);
  EXPECT_TRUE(c.consistent);
}

TEST(Country, EmojiOnly) {
  const auto c = infer_country(with_evidence(std::nullopt, {"PK"}));
  EXPECT_EQ(c.value, Country::Pakistan);
  EXPECT_EQ(c.source, CountrySource::Emoji);
}

TEST(Country, GeoWinsOnDisagreement) {
  const auto c = infer_country(with_evidence("IN", {"PK"}));
  EXPECT_EQ(c.value, Country::India);
  EXPECT_EQ(c.source, CountrySource::Both);
  EXPECT_FALSE(c.consistent);
}

TEST(Country, AgreeingEvidenceIsConsistent) {
  const auto c = infer_country(with_evidence("PK", {"PK"}));
  EXPECT_EQ(c.value, Country::Pakistan);
  EXPECT_EQ(c.source, CountrySource::Both);
  EXPECT_TRUE(c.consistent);
}

TEST(Country, BothFlagsWithoutGeoIsUnknown) {
  EXPECT_EQ(infer_country(with_evidence(std::nullopt, {"IN", "PK"})).value, Country::Unknown);
}

TEST(Country, NoEvidence) {
  const auto c = infer_country(with_evidence(std::nullopt, {}));
  EXPECT_EQ(c.value, Country::Unknown);
  EXPECT_EQ(bucket_of(c.value), CountryBucket::Other);
}

TEST(Country, FlagExtractionFromHandle) {
  EXPECT_EQ(extract_flag_codes("Ali " + flag_emoji("PK")), std::vector<std::string>{"PK"});
}

// ---------------------------------------------------------------- loading

TEST(LoadCorpus, SkipsMalformedLines) {
  TempDir dir("corpus");
  const auto path = dir / "c.jsonl";
  testing_support::spit(path,
                        R"({"id":"1","text":"a","hashtags":["X"],"like_count":1,"retweet_count":2,"timestamp":"2021-04-25T10:00:00Z"})"
                        "\n"
                        "{not json\n"
                        R"({"id":"2","text":"b","hashtags":[],"like_count":0,"retweet_count":0,"timestamp":"2021-04-25T10:00:00Z"})"
                        "\n");
  const auto c = load_corpus(path);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.skipped(), 1u);
}

TEST(LoadCorpus, HashtagSigilDroppedCasingKept) {
  TempDir dir("corpus");
  const auto path = dir / "c.jsonl";
  testing_support::spit(path,
                        R"({"id":"1","text":"a","hashtags":["#IndiaNeedsOxygen"],"like_count":1,"retweet_count":2,"timestamp":"2021-04-25T10:00:00Z"})"
                        "\n");
  const auto c = load_corpus(path);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.records()[0].hashtags, std::vector<std::string>{"IndiaNeedsOxygen"});
}

TEST(LoadCorpus, NegativeCountIsMalformed) {
  TempDir dir("corpus");
  const auto path = dir / "c.jsonl";
  testing_support::spit(path,
                        R"({"id":"1","text":"a","hashtags":[],"like_count":-1,"retweet_count":0,"timestamp":"2021-04-25T10:00:00Z"})"
                        "\n"
                        R"({"id":"2","text":"b","hashtags":[],"like_count":3,"retweet_count":0,"timestamp":"2021-04-25T10:00:00Z"})"
                        "\n");
  const auto c = load_corpus(path);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(c.skipped(), 1u);
}

TEST(LoadCorpus, EmptyAndMissingFiles) {
  TempDir dir("corpus");
  testing_support::spit(dir / "empty.jsonl", "garbage\n");
  EXPECT_THROW(load_corpus(dir / "empty.jsonl"), EmptyCorpusError);
  EXPECT_THROW(load_corpus(dir / "absent.jsonl"), IoError);
}

TEST(LoadCorpus, RoundTrip) {
  TempDir dir("corpus");
  TweetRecord r;
  r.id = "7";
  r.raw_text = "hello world";
  r.hashtags = {"IndiaNeedsOxygen"};
  r.mentions = {"someone"};
  r.urls = {"https://t.co/a"};
  r.like_count = 4;
  r.retweet_count = 9;
  r.geo_country = "IN";
  r.profile_flags = {"IN"};
  r.timestamp = *parse_utc_timestamp("2021-04-25T10:00:00Z");
  write_corpus(dir / "c.jsonl", {r});
  const auto back = load_corpus(dir / "c.jsonl").records().at(0);
  EXPECT_EQ(back.id, r.id);
  EXPECT_EQ(back.raw_text, r.raw_text);
  EXPECT_EQ(back.hashtags, r.hashtags);
  EXPECT_EQ(back.mentions, r.mentions);
  EXPECT_EQ(back.urls, r.urls);
  EXPECT_EQ(back.like_count, r.like_count);
  EXPECT_EQ(back.retweet_count, r.retweet_count);
  EXPECT_EQ(back.geo_country, r.geo_country);
  EXPECT_EQ(back.profile_flags, r.profile_flags);
  EXPECT_EQ(back.timestamp, r.timestamp);
}

// ---------------------------------------------------------------- partition

namespace {
std::vector<HashtagGroup> two_groups() {
  std::istringstream in(
      "# group polarity variants...\n"
      "need supportive IndiaNeedsOxygen IndiaNeedOxygen\n"
      "sorry not-supportive EndiaSaySorryToKashmir\n");
  return parse_groups(in);
}

TweetRecord tagged(std::string id, std::vector<std::string> tags) {
  TweetRecord r;
  r.id = std::move(id);
  r.hashtags = std::move(tags);
  return r;
}
}  // namespace

TEST(Partition, Sides) {
  const Corpus c({tagged("s", {"IndiaNeedsOxygen"}), tagged("d", {"IndiaNeedsOxygen", "EndiaSaySorryToKashmir"}),
                  tagged("u", {"COVID19"}), tagged("n", {"endiasaysorrytokashmir"}), tagged("v", {"INDIANEEDOXYGEN"})});
  const auto p = partition(c, two_groups());
  EXPECT_EQ(p.supportive, (IdSet{"s", "v"}));
  EXPECT_EQ(p.not_supportive, IdSet{"n"});
  EXPECT_EQ(p.discarded, IdSet{"d"});
  EXPECT_EQ(p.unmatched, IdSet{"u"});
}

TEST(Partition, OverlappingVariantsRejected) {
  std::istringstream in("a supportive X Y\nb not-supportive y\n");
  EXPECT_THROW(parse_groups(in), ConfigError);
}

TEST(Partition, DisjointAndExhaustiveOnRandomCorpus) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pool{"IndiaNeedsOxygen", "IndiaNeedOxygen", "EndiaSaySorryToKashmir", "COVID19", "cricket"};
  std::vector<TweetRecord> records;
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> tags;
    for (const auto& t : pool)
      if (rng() % 3 == 0) tags.push_back(t);
    records.push_back(tagged("t" + std::to_string(i), tags));
  }
  const Corpus c(records);
  const auto p = partition(c, two_groups());
  std::size_t total = p.supportive.size() + p.not_supportive.size() + p.discarded.size() + p.unmatched.size();
  EXPECT_EQ(total, c.size());
  std::set<std::string> all;
  for (const auto* s : {&p.supportive, &p.not_supportive, &p.discarded, &p.unmatched}) all.insert(s->begin(), s->end());
  EXPECT_EQ(all.size(), c.size());
}

// ---------------------------------------------------------------- jaccard

TEST(Jaccard, HandCases) {
  EXPECT_EQ(jaccard(IdSet{"1", "2"}, IdSet{"2", "3"}), (Ratio{1, 3}));
  EXPECT_DOUBLE_EQ(jaccard(IdSet{"a", "b"}, IdSet{"a", "b"}).value(), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(IdSet{"a"}, IdSet{"b"}).value(), 0.0);
  EXPECT_THROW(jaccard(IdSet{}, IdSet{}), DataError);
}

TEST(Jaccard, MatchesBruteForceScan) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::set<int> a, b;
    const int universe = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < universe; ++i) {
      if (rng() % 2) a.insert(i);
      if (rng() % 3 == 0) b.insert(i);
    }
    if (a.empty() && b.empty()) a.insert(0);
    // Oracle: scan the whole universe.
    std::uint64_t inter = 0, uni = 0;
    for (int i = 0; i < universe; ++i) {
      const bool in_a = a.contains(i), in_b = b.contains(i);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
    const auto j = jaccard(a, b);
    EXPECT_EQ(j.num, inter);
    EXPECT_EQ(j.den, uni);
    EXPECT_EQ(jaccard(b, a), j);
    EXPECT_EQ(j.num == 0, std::none_of(a.begin(), a.end(), [&](int x) { return b.contains(x); }));
  }
}
