#pragma once

#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "supportive/agreement/annotation.hpp"
#include "supportive/corpus/corpus.hpp"
#include "supportive/corpus/partition.hpp"
#include "supportive/corpus/text.hpp"
#include "supportive/linear/scorer_training.hpp"
#include "supportive/util/hash.hpp"
#include "supportive/util/random.hpp"
#include "supportive/weaklabel/dataset.hpp"

// Synthetic tweets with planted vocabulary signal and known labels.
//
// Supportive content comes in three flavours: hope/solidarity, empathy/
// distress, and devotional wishes. The hope and empathy seed datasets teach
// the first two only, so scorer-ranked lists are pure at the top but never
// surface the third. Not-supportive content is hostile or plain news. Each
// hashtag side also has its own topic words, which is all a hashtag-only
// model can really learn.

namespace supportive::synth {

namespace lexicon {

inline constexpr std::array<std::string_view, 20> hope{
    "humanity", "peace",    "neighbours", "together", "solidarity", "brothers", "unity",    "friendship", "kindness", "harmony",
    "hearts",   "borders",  "stand",      "support",  "hope",       "stronger", "goodwill", "compassion", "united",   "helping"};
inline constexpr std::array<std::string_view, 20> empathy{
    "prayers",  "heartbreaking", "pain",   "grief",   "suffering", "sorrow",  "tears",     "painful",     "devastating", "heartbroken",
    "condolences", "families",   "loss",   "hurts",   "mourn",     "sad",     "agonising", "helpless",    "anguish",     "distressing"};
inline constexpr std::array<std::string_view, 14> devotional{
    "allah", "ameen", "almighty", "protect", "bless", "mercy", "ease", "recover", "greetings", "wishes", "dua", "healing", "speedy", "insha"};
inline constexpr std::array<std::string_view, 20> hostile{
    "shame",   "enemy",   "karma",       "deserve", "liars",  "terror",  "revenge",    "cruel",     "hypocrites", "fascist",
    "crimes",  "brutal",  "propaganda",  "traitors", "regime", "blame",   "arrogant",  "disgrace",  "atrocities", "lies"};
inline constexpr std::array<std::string_view, 18> news{
    "report", "data",   "update",    "official", "statement", "numbers", "record", "daily",   "announced",
    "policy", "tender", "shortage",  "figures",  "ministry",  "briefing", "count", "reported", "sources"};
inline constexpr std::array<std::string_view, 15> topic_supportive{
    "oxygen", "hospital", "covid", "india", "beds", "cylinders", "patients", "delhi", "ventilators", "vaccine", "wave", "crisis",
    "pandemic", "doctors", "icu"};
inline constexpr std::array<std::string_view, 15> topic_not_supportive{
    "kashmir", "apology", "army", "valley", "curfew", "lockdown", "rights", "kashmiris", "forces", "occupied", "pellet", "siege",
    "srinagar", "protest", "media"};
inline constexpr std::array<std::string_view, 12> topic_shared{
    "pakistan", "india", "people", "government", "world", "twitter", "situation", "country", "today", "everyone",
    "time", "news"};
inline constexpr std::array<std::string_view, 30> filler{
    "the", "a", "is", "and", "to", "of", "in", "for", "this", "that", "we", "are", "with", "all", "it",
    "on", "be", "our", "you", "from", "at", "by", "now", "very", "so", "just", "they", "will", "has", "have"};
// Seed-dataset domains: conflict comments (hope format) and news responses
// (empathy format).
inline constexpr std::array<std::string_view, 10> conflict{
    "war", "pulwama", "border", "soldiers", "pilot", "strike", "conflict", "tension", "loc", "abhinandan"};
inline constexpr std::array<std::string_view, 10> article{
    "article", "story", "flood", "victims", "earthquake", "news", "reading", "journalist", "accident", "town"};

}  // namespace lexicon

enum class Subtype { Hope, Empathy, Devotional, Hostile, News };

inline std::string_view to_string(Subtype s) noexcept {
  switch (s) {
    case Subtype::Hope:
      return "hope";
    case Subtype::Empathy:
      return "empathy";
    case Subtype::Devotional:
      return "devotional";
    case Subtype::Hostile:
      return "hostile";
    case Subtype::News:
      break;
  }
  return "news";
}

inline bool is_supportive(Subtype s) noexcept {
  return s == Subtype::Hope || s == Subtype::Empathy || s == Subtype::Devotional;
}

struct SynthConfig {
  std::size_t n_tweets = 5000;
  std::uint64_t seed = 1;
  // Hashtag side shares; the remainder is unmatched.
  double supportive_share = 0.58;
  double not_supportive_share = 0.34;
  double mixed_share = 0.03;
  // Truly supportive content on each side.
  double supportive_positive_rate = 0.444;
  double not_supportive_positive_rate = 0.147;
  // Mix among supportive content: hope, empathy, devotional.
  std::array<double, 3> positive_mix{0.40, 0.35, 0.25};
  double hostile_share_of_negatives = 0.55;
  double topic_own_rate = 0.5;  // topic words from the side's own pool, else shared
  double short_rate = 0.05;     // under ten tokens after cleaning
  double duplicate_rate = 0.03;  // copies an earlier tweet's text verbatim
  double geo_rate = 0.20;
  double flag_rate = 0.30;
  std::string id_prefix = "t";
};

struct SynthTweet {
  TweetRecord record;
  Side side = Side::Unmatched;
  Subtype subtype = Subtype::News;
  bool positive() const noexcept { return is_supportive(subtype); }
};

namespace detail {

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& words, Rng& rng) {
  return words[uniform_below(rng, N)];
}

inline bool chance(Rng& rng, double p) { return uniform_unit(rng) < p; }

inline std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(uniform_below(rng, hi - lo + 1));
}

// Exponential draw by inversion; portable across standard libraries.
inline std::uint64_t exponential_count(Rng& rng, double mean) {
  const double u = 1.0 - uniform_unit(rng);  // (0, 1]
  return static_cast<std::uint64_t>(std::floor(-std::log(u) * mean));
}

inline std::string capitalize(std::string_view w) {
  std::string s(w);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

/// Content words for a subtype, plus topic and filler, shuffled into a body.
inline std::vector<std::string> body_words(Subtype subtype, Side side, bool short_text, double topic_own_rate,
                                           Rng& rng) {
  using namespace lexicon;
  std::vector<std::string> words;
  const std::size_t content = short_text ? between(rng, 1, 2) : between(rng, 2, 5);
  for (std::size_t i = 0; i < content; ++i) {
    switch (subtype) {
      case Subtype::Hope:
        words.emplace_back(chance(rng, 0.85) ? pick(hope, rng) : pick(empathy, rng));
        break;
      case Subtype::Empathy:
        words.emplace_back(chance(rng, 0.85) ? pick(empathy, rng) : pick(hope, rng));
        break;
      case Subtype::Devotional:
        words.emplace_back(chance(rng, 0.9) ? pick(devotional, rng) : pick(filler, rng));
        break;
      case Subtype::Hostile:
        words.emplace_back(chance(rng, 0.9) ? pick(hostile, rng) : pick(news, rng));
        break;
      case Subtype::News:
        words.emplace_back(chance(rng, 0.9) ? pick(news, rng) : pick(filler, rng));
        break;
    }
  }
  const std::size_t topic = short_text ? 1 : between(rng, 2, 4);
  for (std::size_t i = 0; i < topic; ++i) {
    if (!chance(rng, topic_own_rate)) {
      words.emplace_back(pick(topic_shared, rng));
      continue;
    }
    const bool sup_topic = side == Side::Supportive || (side != Side::NotSupportive && chance(rng, 0.5));
    words.emplace_back(sup_topic ? pick(topic_supportive, rng) : pick(topic_not_supportive, rng));
  }
  const std::size_t fill = short_text ? between(rng, 1, 3) : between(rng, 5, 10);
  for (std::size_t i = 0; i < fill; ++i) words.emplace_back(pick(filler, rng));
  shuffle(std::span<std::string>(words), rng);
  return words;
}

struct HashtagChoice {
  std::vector<std::string> supportive_variants{"IndiaNeedsOxygen", "IndiaNeedOxygen", "PakistanStandsWithIndia",
                                               "PakistanStandWithIndia"};
  std::vector<std::string> not_supportive_variants{"EndiaSaySorryToKashmir", "IndiaSaySorryToKashmir"};
  std::vector<std::string> unrelated{"COVID19", "Covid", "Pakistan", "India", "StaySafe", "News"};
};

// Occasional case changes exercise case-insensitive matching.
inline std::string recase(const std::string& tag, Rng& rng) {
  const auto r = uniform_below(rng, 10);
  std::string s = tag;
  if (r == 0)
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  else if (r == 1)
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline std::string weighted_variant(const std::vector<std::string>& v, Rng& rng) {
  // Plural spellings dominate, roughly as in the crawl.
  if (v.size() == 4) {
    static constexpr std::array<double, 4> w{0.5, 0.08, 0.36, 0.06};
    double u = uniform_unit(rng);
    for (std::size_t i = 0; i < 4; ++i) {
      if (u < w[i]) return v[i];
      u -= w[i];
    }
    return v[3];
  }
  return chance(rng, 0.95) ? v[0] : v[1];
}

}  // namespace detail

inline std::vector<HashtagGroup> default_groups() {
  return {
      {"IndiaNeedsOxygen", {"IndiaNeedsOxygen", "IndiaNeedOxygen"}, Polarity::Supportive},
      {"PakistanStandsWithIndia", {"PakistanStandsWithIndia", "PakistanStandWithIndia"}, Polarity::Supportive},
      {"IndiaSaySorryToKashmir", {"EndiaSaySorryToKashmir", "IndiaSaySorryToKashmir"}, Polarity::NotSupportive},
  };
}

inline std::string groups_file_text(const std::vector<HashtagGroup>& groups) {
  std::string out = "# group_id polarity variant...\n";
  for (const auto& g : groups) {
    out += g.group_id + " " + std::string(to_string(g.polarity));
    for (const auto& v : g.variants) out += " " + v;
    out += "\n";
  }
  return out;
}

/// The corpus. Deterministic in the config.
inline std::vector<SynthTweet> generate_corpus(const SynthConfig& cfg) {
  using namespace detail;
  Rng rng = make_rng(derive_seed(cfg.seed, 101));
  const HashtagChoice tags;
  const auto start = std::chrono::sys_days{std::chrono::year{2021} / 4 / 21};
  const std::uint64_t span_seconds = 14ull * 24 * 3600;

  std::vector<SynthTweet> out;
  out.reserve(cfg.n_tweets);
  for (std::size_t i = 0; i < cfg.n_tweets; ++i) {
    SynthTweet t;
    auto& r = t.record;
    r.id = cfg.id_prefix + std::to_string(100000 + i);

    const double u = uniform_unit(rng);
    if (u < cfg.supportive_share)
      t.side = Side::Supportive;
    else if (u < cfg.supportive_share + cfg.not_supportive_share)
      t.side = Side::NotSupportive;
    else if (u < cfg.supportive_share + cfg.not_supportive_share + cfg.mixed_share)
      t.side = Side::Discarded;
    else
      t.side = Side::Unmatched;

    const double pos_rate = t.side == Side::Supportive      ? cfg.supportive_positive_rate
                            : t.side == Side::NotSupportive ? cfg.not_supportive_positive_rate
                                                            : 0.5;
    if (chance(rng, pos_rate)) {
      const double v = uniform_unit(rng);
      t.subtype = v < cfg.positive_mix[0]                           ? Subtype::Hope
                  : v < cfg.positive_mix[0] + cfg.positive_mix[1] ? Subtype::Empathy
                                                                    : Subtype::Devotional;
    } else {
      t.subtype = chance(rng, cfg.hostile_share_of_negatives) ? Subtype::Hostile : Subtype::News;
    }

    // Hashtags for the side.
    switch (t.side) {
      case Side::Supportive:
        r.hashtags.push_back(recase(weighted_variant(tags.supportive_variants, rng), rng));
        if (chance(rng, 0.12)) r.hashtags.push_back(recase(weighted_variant(tags.supportive_variants, rng), rng));
        break;
      case Side::NotSupportive:
        r.hashtags.push_back(recase(weighted_variant(tags.not_supportive_variants, rng), rng));
        break;
      case Side::Discarded:
        r.hashtags.push_back(recase(weighted_variant(tags.supportive_variants, rng), rng));
        r.hashtags.push_back(recase(weighted_variant(tags.not_supportive_variants, rng), rng));
        break;
      case Side::Unmatched:
        break;
    }
    if (chance(rng, 0.3) || r.hashtags.empty()) r.hashtags.push_back(tags.unrelated[uniform_below(rng, tags.unrelated.size())]);

    // Body text, or a verbatim copy of an earlier tweet on the same side.
    bool copied = false;
    if (!out.empty() && chance(rng, cfg.duplicate_rate)) {
      for (std::size_t tries = 0; tries < 8 && !copied; ++tries) {
        const auto& src = out[uniform_below(rng, out.size())];
        if (src.side != t.side) continue;
        r.raw_text = src.record.raw_text;
        r.hashtags = src.record.hashtags;
        t.subtype = src.subtype;
        copied = true;
      }
    }
    if (!copied) {
      const bool short_text = chance(rng, cfg.short_rate);
      auto words = body_words(t.subtype, t.side, short_text, cfg.topic_own_rate, rng);
      std::string text;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w) text += (chance(rng, 0.08) ? ", " : " ");
        text += (w == 0 || chance(rng, 0.05)) ? capitalize(words[w]) : words[w];
      }
      text += chance(rng, 0.5) ? "!" : ".";
      if (chance(rng, 0.25)) text += " \xF0\x9F\x99\x8F";  // folded hands
      if (chance(rng, 0.15)) text += " \xE2\x9D\xA4\xEF\xB8\x8F";  // red heart
      for (const auto& h : r.hashtags) text += " #" + h;
      if (chance(rng, 0.3)) {
        r.mentions.push_back("user" + std::to_string(uniform_below(rng, 500)));
        text = "@" + r.mentions.back() + " " + text;
      }
      if (chance(rng, 0.3)) {
        r.urls.push_back("https://t.co/" + fingerprint_of(r.id).substr(0, 10));
        text += " " + r.urls.back();
      }
      r.raw_text = std::move(text);
    }

    // Location evidence. Flags agree with geo whenever both are present.
    std::string country;
    const double c = uniform_unit(rng);
    country = c < 0.30 ? "IN" : c < 0.62 ? "PK" : c < 0.75 ? "US" : "";
    if (!country.empty() && chance(rng, cfg.geo_rate)) r.geo_country = country;
    if ((country == "IN" || country == "PK") && chance(rng, cfg.flag_rate)) r.profile_flags.push_back(country);
    if (!r.geo_country && r.profile_flags.empty() && chance(rng, 0.01)) r.profile_flags = {"IN", "PK"};

    // Engagement: Pakistan-origin supportive tweets draw more likes.
    double like_mean = t.side == Side::NotSupportive ? 2.0 : 3.0;
    double retweet_mean = t.side == Side::NotSupportive ? 250.0 : 900.0;
    if (country == "PK" && t.positive()) like_mean *= 2.5;
    if (country == "IN") retweet_mean *= 1.6;
    r.like_count = exponential_count(rng, like_mean);
    r.retweet_count = exponential_count(rng, retweet_mean);
    r.timestamp = std::chrono::sys_seconds{start} + std::chrono::seconds(uniform_below(rng, span_seconds));
    out.push_back(std::move(t));
  }
  return out;
}

struct SeedConfig {
  std::size_t positives = 916;
  std::size_t negatives = 905;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string seed_text(const std::vector<std::string_view>& content, const std::vector<std::string_view>& domain,
                             Rng& rng) {
  std::vector<std::string> words;
  const std::size_t n_content = between(rng, 2, 4);
  for (std::size_t i = 0; i < n_content; ++i) words.emplace_back(content[uniform_below(rng, content.size())]);
  const std::size_t n_domain = between(rng, 2, 3);
  for (std::size_t i = 0; i < n_domain; ++i) words.emplace_back(domain[uniform_below(rng, domain.size())]);
  const std::size_t n_fill = between(rng, 5, 9);
  for (std::size_t i = 0; i < n_fill; ++i) words.emplace_back(pick(lexicon::filler, rng));
  shuffle(std::span<std::string>(words), rng);
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) text += (i ? " " : "") + words[i];
  return text + ".";
}

template <std::size_t N>
std::vector<std::string_view> view(const std::array<std::string_view, N>& a) {
  return {a.begin(), a.end()};
}

inline std::vector<SeedExample> seed_set(const std::vector<std::string_view>& pos_words,
                                         const std::vector<std::string_view>& neg_words,
                                         const std::vector<std::string_view>& domain, const SeedConfig& cfg,
                                         std::uint64_t stream, double label_noise) {
  Rng rng = make_rng(derive_seed(cfg.seed, stream));
  std::vector<SeedExample> out;
  for (std::size_t i = 0; i < cfg.positives + cfg.negatives; ++i) {
    const bool positive = i < cfg.positives;
    const bool as_positive = chance(rng, label_noise) ? !positive : positive;
    out.push_back({seed_text(as_positive ? pos_words : neg_words, domain, rng), positive});
  }
  shuffle(std::span<SeedExample>(out), rng);
  return out;
}

}  // namespace detail

/// Hope-speech-format seed data: peace-seeking versus hostile comments in a
/// conflict setting.
inline std::vector<SeedExample> hope_seed_dataset(const SeedConfig& cfg) {
  using namespace lexicon;
  auto pos = detail::view(hope);
  auto neg = detail::view(hostile);
  return detail::seed_set(pos, neg, detail::view(conflict), cfg, 201, 0.05);
}

/// Empathy-distress-format seed data: emotional versus detached responses
/// to news stories. Labels are noisier than the hope data.
inline std::vector<SeedExample> empathy_seed_dataset(const SeedConfig& cfg) {
  using namespace lexicon;
  auto pos = detail::view(empathy);
  auto neg = detail::view(news);
  neg.insert(neg.end(), hostile.begin(), hostile.begin() + 5);
  return detail::seed_set(pos, neg, detail::view(article), cfg, 202, 0.10);
}

/// Human-labeled training data drawn fresh from the same distribution as the
/// corpus (separate ids, so it never overlaps an evaluation sample).
inline WeakDataset supervised_dataset(const SynthConfig& corpus_cfg, std::size_t n, std::uint64_t seed) {
  SynthConfig cfg = corpus_cfg;
  cfg.n_tweets = n * 3;
  cfg.seed = derive_seed(seed, 303);
  cfg.duplicate_rate = 0.0;
  cfg.id_prefix = "s";
  WeakDataset ds;
  ds.kind = "supervised";
  ds.config = json{{"n", n}, {"seed", seed}};
  for (const auto& t : generate_corpus(cfg)) {
    if (ds.examples.size() == n) break;
    if (t.side != Side::Supportive && t.side != Side::NotSupportive) continue;
    auto ct = clean(t.record.raw_text);
    if (!passes_length_filter(ct)) continue;
    ds.examples.push_back(
        {t.record.id, std::move(ct), t.positive() ? Label::Supportive : Label::NotSupportive, Provenance::Gold, ""});
  }
  return ds;
}

/// Simulated annotators: annotator a flips the true label with
/// error_rates[a], independently per item. Deterministic per (seed, a, id).
inline AnnotationMatrix simulate_annotations(const std::vector<std::string>& ids, const std::vector<std::string>& texts,
                                             const std::unordered_map<std::string, bool>& truth,
                                             const std::vector<double>& error_rates, std::uint64_t seed, int round = 1) {
  AnnotationMatrix m;
  m.annotators = error_rates.size();
  m.round = round;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = truth.find(ids[i]);
    if (it == truth.end()) throw DataError("no ground truth for '" + ids[i] + "'");
    std::vector<std::optional<std::string>> row;
    for (std::size_t a = 0; a < error_rates.size(); ++a) {
      Rng rng = make_rng(derive_seed(derive_seed(seed, a), Fingerprint{}.field(ids[i]).value()));
      const bool flip = uniform_unit(rng) < error_rates[a];
      const bool label = flip ? !it->second : it->second;
      row.emplace_back(std::string(to_string(label ? Label::Supportive : Label::NotSupportive)));
    }
    m.add(ids[i], texts[i], std::move(row));
  }
  return m;
}

}  // namespace supportive::synth
