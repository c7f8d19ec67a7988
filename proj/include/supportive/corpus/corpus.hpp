#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "supportive/corpus/record.hpp"
#include "supportive/error.hpp"
#include "supportive/util/jsonl.hpp"

namespace supportive {

/// Maps TweetRecord fields onto the keys used in a particular dump.
struct FieldMapping {
  std::string id = "id";
  std::string text = "text";
  std::string hashtags = "hashtags";
  std::string mentions = "mentions";
  std::string urls = "urls";
  std::string like_count = "like_count";
  std::string retweet_count = "retweet_count";
  std::string geo_country = "geo_country";
  std::string profile_flags = "profile_flags";
  std::string timestamp = "timestamp";

  static FieldMapping from_json(const json& j) {
    FieldMapping m;
    auto take = [&](const char* key, std::string& field) {
      if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    take("id", m.id);
    take("text", m.text);
    take("hashtags", m.hashtags);
    take("mentions", m.mentions);
    take("urls", m.urls);
    take("like_count", m.like_count);
    take("retweet_count", m.retweet_count);
    take("geo_country", m.geo_country);
    take("profile_flags", m.profile_flags);
    take("timestamp", m.timestamp);
    return m;
  }
};

struct LoadIssue {
  std::size_t line = 0;
  std::string reason;
};

class Corpus {
 public:
  Corpus() = default;

  /// Takes ownership of records; duplicate ids raise DataError.
  explicit Corpus(std::vector<TweetRecord> records) {
    for (auto& r : records) {
      std::string id = r.id;
      if (!add(std::move(r))) throw DataError("duplicate tweet id '" + id + "'");
    }
  }

  const std::vector<TweetRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const TweetRecord* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  std::size_t skipped() const noexcept { return issues_.size(); }
  const std::vector<LoadIssue>& issues() const noexcept { return issues_; }

  bool add(TweetRecord r) {
    if (index_.contains(r.id)) return false;
    index_.emplace(r.id, records_.size());
    records_.push_back(std::move(r));
    return true;
  }

  void note_issue(std::size_t line, std::string reason) { issues_.push_back({line, std::move(reason)}); }

 private:
  std::vector<TweetRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<LoadIssue> issues_;
};

namespace corpus_detail {

inline std::vector<std::string> string_list(const json& j, const std::string& key, char sigil) {
  std::vector<std::string> out;
  if (!j.contains(key) || j.at(key).is_null()) return out;
  for (const auto& v : j.at(key)) {
    std::string s = v.get<std::string>();
    if (sigil && !s.empty() && s.front() == sigil) s.erase(0, 1);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::uint64_t count_field(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return 0;
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto x = v.get<std::int64_t>();
    if (x < 0) throw DataError("negative " + key);
    return static_cast<std::uint64_t>(x);
  }
  throw DataError(key + " is not an integer");
}

}  // namespace corpus_detail

/// Converts one parsed line into a record. Throws DataError (or a json
/// exception) when the line does not describe a well-formed record.
inline TweetRecord record_from_json(const json& j, const FieldMapping& m = {}) {
  using namespace corpus_detail;
  if (!j.is_object()) throw DataError("record is not an object");
  TweetRecord r;
  const auto& id = j.at(m.id);
  if (id.is_string())
    r.id = id.get<std::string>();
  else if (id.is_number_integer())
    r.id = id.dump();
  else
    throw DataError("id is neither string nor integer");
  if (r.id.empty()) throw DataError("empty id");
  r.raw_text = j.at(m.text).get<std::string>();
  r.hashtags = string_list(j, m.hashtags, '#');
  r.mentions = string_list(j, m.mentions, '@');
  r.urls = string_list(j, m.urls, 0);
  r.like_count = count_field(j, m.like_count);
  r.retweet_count = count_field(j, m.retweet_count);
  if (j.contains(m.geo_country) && !j.at(m.geo_country).is_null()) {
    std::string geo = j.at(m.geo_country).get<std::string>();
    if (!geo.empty()) r.geo_country = std::move(geo);
  }
  r.profile_flags = string_list(j, m.profile_flags, 0);
  auto ts = parse_utc_timestamp(j.at(m.timestamp).get<std::string>());
  if (!ts) throw DataError("timestamp is not an ISO-8601 UTC instant");
  r.timestamp = *ts;
  return r;
}

inline json record_to_json(const TweetRecord& r) {
  json j;
  j["id"] = r.id;
  j["text"] = r.raw_text;
  j["hashtags"] = r.hashtags;
  j["mentions"] = r.mentions;
  j["urls"] = r.urls;
  j["like_count"] = r.like_count;
  j["retweet_count"] = r.retweet_count;
  j["geo_country"] = r.geo_country ? json(*r.geo_country) : json(nullptr);
  j["profile_flags"] = r.profile_flags;
  j["timestamp"] = format_utc_timestamp(r.timestamp);
  return j;
}

/// Loads a line-delimited corpus. Malformed lines (bad JSON, missing or
/// ill-typed fields, duplicate ids) are skipped and recorded in issues().
inline Corpus load_corpus(const std::filesystem::path& path, const FieldMapping& mapping = {}) {
  Corpus corpus;
  read_jsonl(
      path,
      [&](const json& j, std::size_t line) {
        try {
          TweetRecord r = record_from_json(j, mapping);
          const std::string id = r.id;
          if (!corpus.add(std::move(r))) corpus.note_issue(line, "duplicate id '" + id + "'");
        } catch (const std::exception& e) {
          corpus.note_issue(line, e.what());
        }
      },
      {}, [&](std::size_t line, const std::string& reason) { corpus.note_issue(line, reason); });
  if (corpus.empty())
    throw EmptyCorpusError("no well-formed records in '" + path.string() + "' (" +
                           std::to_string(corpus.skipped()) + " malformed)");
  return corpus;
}

inline void write_corpus(const std::filesystem::path& path, const std::vector<TweetRecord>& records) {
  auto out = open_output(path);
  for (const auto& r : records) write_json_line(out, record_to_json(r));
}

}  // namespace supportive
