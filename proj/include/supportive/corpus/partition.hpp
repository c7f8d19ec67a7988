#pragma once

#include <concepts>
#include <filesystem>
#include <ranges>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "supportive/corpus/corpus.hpp"
#include "supportive/corpus/text.hpp"
#include "supportive/error.hpp"

namespace supportive {

using IdSet = std::set<std::string>;

enum class Polarity { Supportive, NotSupportive };

inline std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::Supportive ? "supportive" : "not-supportive";
}

inline std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "supportive") return Polarity::Supportive;
  if (s == "not-supportive" || s == "not_supportive") return Polarity::NotSupportive;
  return std::nullopt;
}

/// A hashtag and its spelling variants, e.g. IndiaNeedsOxygen / IndiaNeedOxygen.
/// Variants keep their configured spelling; matching is case-insensitive.
struct HashtagGroup {
  std::string group_id;
  std::vector<std::string> variants;
  Polarity polarity = Polarity::Supportive;
};

/// Case-insensitive lookup from a hashtag spelling to its group.
class GroupIndex {
 public:
  explicit GroupIndex(const std::vector<HashtagGroup>& groups) {
    if (groups.empty()) throw ConfigError("no hashtag groups configured");
    std::set<std::string> group_ids;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      polarity_.push_back(groups[g].polarity);
      if (!group_ids.insert(groups[g].group_id).second)
        throw ConfigError("duplicate hashtag group '" + groups[g].group_id + "'");
      if (groups[g].variants.empty()) throw ConfigError("hashtag group '" + groups[g].group_id + "' has no variants");
      for (const auto& v : groups[g].variants) {
        auto [it, inserted] = by_variant_.emplace(fold_case(v), g);
        if (!inserted && it->second != g)
          throw ConfigError("hashtag variant '" + v + "' appears in groups '" + groups[it->second].group_id +
                            "' and '" + groups[g].group_id + "'");
      }
    }
  }

  std::optional<std::size_t> group_of(std::string_view hashtag) const {
    if (!hashtag.empty() && hashtag.front() == '#') hashtag.remove_prefix(1);
    auto it = by_variant_.find(fold_case(hashtag));
    if (it == by_variant_.end()) return std::nullopt;
    return it->second;
  }

  Polarity polarity(std::size_t group) const { return polarity_.at(group); }
  std::size_t size() const noexcept { return polarity_.size(); }

 private:
  std::vector<Polarity> polarity_;
  std::unordered_map<std::string, std::size_t> by_variant_;
};

/// Reads hashtag groups from plain text, one group per line:
///
///   <group_id> <supportive|not-supportive> <variant> [<variant> ...]
///
/// Blank lines and lines starting with '#' are ignored. A variant may carry
/// its own leading '#'.
inline std::vector<HashtagGroup> parse_groups(std::istream& in) {
  std::vector<HashtagGroup> groups;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string group_id;
    if (!(fields >> group_id) || group_id.front() == '#') continue;
    std::string polarity;
    fields >> polarity;
    auto p = parse_polarity(polarity);
    if (!p)
      throw ConfigError("hashtag groups line " + std::to_string(line_no) + ": unknown polarity '" + polarity + "'");
    HashtagGroup g{group_id, {}, *p};
    std::string variant;
    while (fields >> variant) {
      if (variant.front() == '#') variant.erase(0, 1);
      if (!variant.empty()) g.variants.push_back(variant);
    }
    if (g.variants.empty())
      throw ConfigError("hashtag groups line " + std::to_string(line_no) + ": no variants");
    groups.push_back(std::move(g));
  }
  GroupIndex validate(groups);
  return groups;
}

inline std::vector<HashtagGroup> load_groups(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read hashtag groups '" + path.string() + "'");
  return parse_groups(in);
}

enum class Side { Supportive, NotSupportive, Discarded, Unmatched };

inline std::string_view to_string(Side s) noexcept {
  switch (s) {
    case Side::Supportive:
      return "supportive";
    case Side::NotSupportive:
      return "not-supportive";
    case Side::Discarded:
      return "discarded";
    case Side::Unmatched:
      return "unmatched";
  }
  return "unmatched";
}

inline std::optional<Side> parse_side(std::string_view s) {
  if (s == "supportive") return Side::Supportive;
  if (s == "not-supportive") return Side::NotSupportive;
  if (s == "discarded") return Side::Discarded;
  if (s == "unmatched") return Side::Unmatched;
  return std::nullopt;
}

struct CorpusPartition {
  IdSet supportive;
  IdSet not_supportive;
  IdSet discarded;
  IdSet unmatched;

  IdSet& side(Side s) {
    switch (s) {
      case Side::Supportive:
        return supportive;
      case Side::NotSupportive:
        return not_supportive;
      case Side::Discarded:
        return discarded;
      case Side::Unmatched:
        break;
    }
    return unmatched;
  }
  const IdSet& side(Side s) const { return const_cast<CorpusPartition*>(this)->side(s); }

  std::size_t size() const noexcept {
    return supportive.size() + not_supportive.size() + discarded.size() + unmatched.size();
  }

  std::optional<Side> side_of(const std::string& id) const {
    for (Side s : {Side::Supportive, Side::NotSupportive, Side::Discarded, Side::Unmatched})
      if (side(s).contains(id)) return s;
    return std::nullopt;
  }

  /// Copy keeping only ids for which keep(id) holds; disjointness is preserved.
  template <class Pred>
  CorpusPartition restricted(Pred&& keep) const {
    CorpusPartition out;
    for (Side s : {Side::Supportive, Side::NotSupportive, Side::Discarded, Side::Unmatched})
      for (const auto& id : side(s))
        if (keep(id)) out.side(s).insert(id);
    return out;
  }

  /// Labeled sides only: supportive ∪ not_supportive.
  IdSet labeled_union() const {
    IdSet u = supportive;
    u.insert(not_supportive.begin(), not_supportive.end());
    return u;
  }
};

/// Which polarities a record's hashtags hit.
inline Side classify_hashtags(const std::vector<std::string>& hashtags, const GroupIndex& index) {
  bool sup = false;
  bool non = false;
  for (const auto& h : hashtags) {
    if (auto g = index.group_of(h)) {
      if (index.polarity(*g) == Polarity::Supportive)
        sup = true;
      else
        non = true;
    }
  }
  if (sup && non) return Side::Discarded;
  if (sup) return Side::Supportive;
  if (non) return Side::NotSupportive;
  return Side::Unmatched;
}

/// Anything with an `id` and a `hashtags` list: TweetRecord, ingested rows.
template <class R>
concept HashtaggedRecord = requires(const R& r) {
  { r.id } -> std::convertible_to<std::string>;
  { r.hashtags } -> std::convertible_to<std::vector<std::string>>;
};

template <std::ranges::input_range Records>
  requires HashtaggedRecord<std::ranges::range_value_t<Records>>
CorpusPartition partition(const Records& records, const std::vector<HashtagGroup>& groups) {
  const GroupIndex index(groups);
  CorpusPartition part;
  for (const auto& r : records) part.side(classify_hashtags(r.hashtags, index)).insert(r.id);
  return part;
}

inline CorpusPartition partition(const Corpus& corpus, const std::vector<HashtagGroup>& groups) {
  return partition(corpus.records(), groups);
}

/// Tweet ids per group (a tweet may belong to several groups).
template <std::ranges::input_range Records>
  requires HashtaggedRecord<std::ranges::range_value_t<Records>>
std::vector<IdSet> group_members(const Records& records, const std::vector<HashtagGroup>& groups) {
  const GroupIndex index(groups);
  std::vector<IdSet> members(groups.size());
  for (const auto& r : records)
    for (const auto& h : r.hashtags)
      if (auto g = index.group_of(h)) members[*g].insert(r.id);
  return members;
}

inline std::vector<IdSet> group_members(const Corpus& corpus, const std::vector<HashtagGroup>& groups) {
  return group_members(corpus.records(), groups);
}

}  // namespace supportive
