#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "supportive/corpus/country.hpp"
#include "supportive/corpus/jaccard.hpp"
#include "supportive/corpus/partition.hpp"
#include "supportive/corpus/text.hpp"
#include "supportive/error.hpp"
#include "supportive/util/stats.hpp"

namespace supportive {

/// Engagement figures for one tweet.
struct EngagementInput {
  std::string id;
  std::uint64_t likes = 0;
  std::uint64_t retweets = 0;
  CountryBucket bucket = CountryBucket::Other;
};

/// A named set of tweet ids: a hashtag group, or a predicted label.
struct NamedGroup {
  std::string name;
  IdSet ids;
};

/// Denominator for a row's share: the group's own total across buckets
/// ("how is this hashtag split by country"), or the bucket's total across
/// groups ("how are this country's tweets split by label").
enum class ShareBasis { Group, Bucket };

struct EngagementRow {
  std::string group;
  CountryBucket bucket = CountryBucket::Other;
  std::uint64_t count = 0;
  std::optional<MeanStd> likes;  // absent for an empty row
  std::optional<MeanStd> retweets;
  double share = 0.0;
};

namespace analytics_detail {

__extension__ typedef unsigned __int128 u128;

// Exact integer moments, so the result does not depend on input order.
struct Moments {
  std::uint64_t n = 0;
  u128 sum = 0;
  u128 sum_sq = 0;

  void add(std::uint64_t x) {
    ++n;
    sum += x;
    sum_sq += static_cast<u128>(x) * x;
  }

  /// Mean and population standard deviation.
  std::optional<MeanStd> summary() const {
    if (n == 0) return std::nullopt;
    const auto nn = static_cast<u128>(n);
    const u128 num = nn * sum_sq - sum * sum;  // n²·variance, never negative
    const double dn = static_cast<double>(n);
    return MeanStd{static_cast<double>(sum) / dn, std::sqrt(static_cast<double>(num)) / dn};
  }
};

}  // namespace analytics_detail

inline constexpr CountryBucket kAllBuckets[] = {CountryBucket::India, CountryBucket::Pakistan, CountryBucket::Other};

/// One row per (group, bucket) in group order, then India, Pakistan, Other.
/// Like and retweet spreads are population standard deviations.
inline std::vector<EngagementRow> engagement_stats(std::span<const EngagementInput> tweets,
                                                   const std::vector<NamedGroup>& groups,
                                                   ShareBasis basis = ShareBasis::Group) {
  using analytics_detail::Moments;
  constexpr std::size_t B = std::size(kAllBuckets);
  std::vector<std::array<Moments, B>> likes(groups.size());
  std::vector<std::array<Moments, B>> retweets(groups.size());
  for (const auto& t : tweets) {
    const auto b = static_cast<std::size_t>(t.bucket);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!groups[g].ids.contains(t.id)) continue;
      likes[g][b].add(t.likes);
      retweets[g][b].add(t.retweets);
    }
  }
  std::vector<std::uint64_t> group_total(groups.size(), 0);
  std::array<std::uint64_t, B> bucket_total{};
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t b = 0; b < B; ++b) {
      group_total[g] += likes[g][b].n;
      bucket_total[b] += likes[g][b].n;
    }

  std::vector<EngagementRow> rows;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t b = 0; b < B; ++b) {
      EngagementRow r;
      r.group = groups[g].name;
      r.bucket = kAllBuckets[b];
      r.count = likes[g][b].n;
      r.likes = likes[g][b].summary();
      r.retweets = retweets[g][b].summary();
      const std::uint64_t den = basis == ShareBasis::Group ? group_total[g] : bucket_total[b];
      r.share = den ? static_cast<double>(r.count) / static_cast<double>(den) : 0.0;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

/// Tweets per exact variant spelling (matched case-insensitively, once per
/// tweet), overall and for India and Pakistan.
struct HashtagCountRow {
  std::string variant;
  std::uint64_t total = 0;
  std::uint64_t india = 0;
  std::uint64_t pakistan = 0;
};

/// Variant rows in configuration order followed by an "All" row that sums
/// the columns (a tweet carrying two variants counts in both rows).
template <class Records>
std::vector<HashtagCountRow> hashtag_counts(const Records& records, const std::vector<HashtagGroup>& groups,
                                            const std::unordered_map<std::string, CountryBucket>& buckets) {
  std::vector<HashtagCountRow> rows;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& g : groups)
    for (const auto& v : g.variants) {
      row_of.emplace(fold_case(v), rows.size());
      rows.push_back({v});
    }
  std::vector<std::size_t> hit;
  for (const auto& r : records) {
    hit.clear();
    for (const auto& h : r.hashtags)
      if (auto it = row_of.find(fold_case(h)); it != row_of.end()) hit.push_back(it->second);
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    if (hit.empty()) continue;
    auto b = buckets.find(r.id);
    const CountryBucket bucket = b == buckets.end() ? CountryBucket::Other : b->second;
    for (std::size_t i : hit) {
      ++rows[i].total;
      rows[i].india += bucket == CountryBucket::India;
      rows[i].pakistan += bucket == CountryBucket::Pakistan;
    }
  }
  HashtagCountRow all{"All"};
  for (const auto& r : rows) {
    all.total += r.total;
    all.india += r.india;
    all.pakistan += r.pakistan;
  }
  rows.push_back(all);
  return rows;
}

/// Term counts over all documents, most frequent first, ties in
/// lexicographic order; at most top_n entries.
inline std::vector<std::pair<std::string, std::uint64_t>> term_frequencies(std::span<const CleanText> docs,
                                                                          std::size_t top_n) {
  if (top_n == 0) throw ConfigError("top_n must be at least 1");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& d : docs)
    for (const auto& t : d.tokens) ++counts[t];
  std::vector<std::pair<std::string, std::uint64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

/// Pairwise Jaccard indices between groups; absent where both sets are empty.
inline std::vector<std::vector<std::optional<Ratio>>> jaccard_table(const std::vector<NamedGroup>& groups) {
  std::vector<std::vector<std::optional<Ratio>>> m(groups.size(), std::vector<std::optional<Ratio>>(groups.size()));
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = 0; j < groups.size(); ++j)
      if (!groups[i].ids.empty() || !groups[j].ids.empty()) m[i][j] = jaccard(groups[i].ids, groups[j].ids);
  return m;
}

}  // namespace supportive
