#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "supportive/corpus/record.hpp"

namespace supportive {

enum class Country { India, Pakistan, Other, Unknown };

/// Which evidence decided the label. None means no usable evidence.
enum class CountrySource { None, Geo, Emoji, Both };

struct CountryLabel {
  Country value = Country::Unknown;
  CountrySource source = CountrySource::None;
  bool consistent = true;

  friend bool operator==(const CountryLabel&, const CountryLabel&) = default;
};

/// Reporting bucket for location-specific tables; Unknown folds into Other.
enum class CountryBucket { India, Pakistan, Other };

inline CountryBucket bucket_of(Country c) noexcept {
  switch (c) {
    case Country::India:
      return CountryBucket::India;
    case Country::Pakistan:
      return CountryBucket::Pakistan;
    default:
      return CountryBucket::Other;
  }
}

inline std::string_view to_string(Country c) noexcept {
  switch (c) {
    case Country::India:
      return "India";
    case Country::Pakistan:
      return "Pakistan";
    case Country::Other:
      return "Other";
    case Country::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

inline std::string_view to_string(CountryBucket b) noexcept {
  switch (b) {
    case CountryBucket::India:
      return "India";
    case CountryBucket::Pakistan:
      return "Pakistan";
    case CountryBucket::Other:
      return "Other";
  }
  return "Other";
}

inline std::string_view to_string(CountrySource s) noexcept {
  switch (s) {
    case CountrySource::None:
      return "none";
    case CountrySource::Geo:
      return "geo";
    case CountrySource::Emoji:
      return "emoji";
    case CountrySource::Both:
      return "both";
  }
  return "none";
}

inline std::optional<Country> parse_country(std::string_view s) {
  if (s == "India") return Country::India;
  if (s == "Pakistan") return Country::Pakistan;
  if (s == "Other") return Country::Other;
  if (s == "Unknown") return Country::Unknown;
  return std::nullopt;
}

inline std::optional<CountrySource> parse_country_source(std::string_view s) {
  if (s == "none") return CountrySource::None;
  if (s == "geo") return CountrySource::Geo;
  if (s == "emoji") return CountrySource::Emoji;
  if (s == "both") return CountrySource::Both;
  return std::nullopt;
}

inline Country country_from_code(std::string_view code) {
  std::string up(code);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "IN") return Country::India;
  if (up == "PK") return Country::Pakistan;
  return Country::Other;
}

/// Platform geo wins; the India/Pakistan flag signal is used otherwise. A
/// profile carrying both flags is ambiguous and yields no emoji evidence.
inline CountryLabel infer_country(const TweetRecord& record) {
  bool india_flag = false;
  bool pakistan_flag = false;
  for (const auto& f : record.profile_flags) {
    const Country c = country_from_code(f);
    india_flag |= c == Country::India;
    pakistan_flag |= c == Country::Pakistan;
  }
  std::optional<Country> emoji;
  if (india_flag != pakistan_flag) emoji = india_flag ? Country::India : Country::Pakistan;

  if (record.geo_country) {
    const Country geo = country_from_code(*record.geo_country);
    if (!emoji) return {geo, CountrySource::Geo, true};
    return {geo, CountrySource::Both, geo == *emoji};
  }
  if (emoji) return {*emoji, CountrySource::Emoji, true};
  return {Country::Unknown, CountrySource::None, true};
}

}  // namespace supportive
