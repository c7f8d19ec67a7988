#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace supportive {

/// Normalized tweet body: no hashtags, mentions, urls, emoji or punctuation;
/// lowercased; single spaces between tokens.
struct CleanText {
  std::string text;
  std::vector<std::string> tokens;

  std::size_t token_count() const noexcept { return tokens.size(); }

  /// Wraps text that is already normalized (e.g. read back from a dataset file).
  static CleanText from_normalized(std::string_view normalized) {
    CleanText ct;
    std::size_t i = 0;
    while (i < normalized.size()) {
      while (i < normalized.size() && normalized[i] == ' ') ++i;
      const std::size_t start = i;
      while (i < normalized.size() && normalized[i] != ' ') ++i;
      if (i > start) ct.tokens.emplace_back(normalized.substr(start, i - start));
    }
    for (std::size_t t = 0; t < ct.tokens.size(); ++t) {
      if (t) ct.text += ' ';
      ct.text += ct.tokens[t];
    }
    return ct;
  }

  friend bool operator==(const CleanText&, const CleanText&) = default;
};

namespace text_detail {

inline std::vector<UChar32> decode(std::string_view s) {
  std::vector<UChar32> out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? 0xFFFD : c);
  }
  return out;
}

inline void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  std::int32_t n = 0;
  UBool err = false;
  U8_APPEND(reinterpret_cast<std::uint8_t*>(buf), n, U8_MAX_LENGTH, c, err);
  if (!err) out.append(buf, static_cast<std::size_t>(n));
}

inline bool is_word_char(UChar32 c) {
  if (c == '_') return true;
  if (u_isalnum(c)) return true;
  const auto cat = u_charType(c);
  return cat == U_NON_SPACING_MARK || cat == U_COMBINING_SPACING_MARK;
}

inline bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

inline bool is_emoji(UChar32 c) {
  if (c < 0x80) return false;  // '#', '*' and digits carry the Emoji property
  return u_hasBinaryProperty(c, UCHAR_EMOJI) || u_hasBinaryProperty(c, UCHAR_EMOJI_COMPONENT) ||
         u_hasBinaryProperty(c, UCHAR_EXTENDED_PICTOGRAPHIC) ||
         u_hasBinaryProperty(c, UCHAR_VARIATION_SELECTOR);
}

inline bool is_apostrophe(UChar32 c) { return c == '\'' || c == 0x2019 || c == 0x02BC; }

inline bool is_strippable_symbol(UChar32 c) {
  switch (u_charType(c)) {
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
    case U_CONTROL_CHAR:
    case U_FORMAT_CHAR:
    case U_PRIVATE_USE_CHAR:
    case U_UNASSIGNED:
      return true;
    default:
      return false;
  }
}

inline char32_t ascii_lower(UChar32 c) { return (c >= 'A' && c <= 'Z') ? c + 32 : c; }

inline bool starts_with_ci(const std::vector<UChar32>& cps, std::size_t at, std::string_view prefix) {
  if (at + prefix.size() > cps.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k)
    if (ascii_lower(cps[at + k]) != static_cast<unsigned char>(prefix[k])) return false;
  return true;
}

inline bool url_starts_at(const std::vector<UChar32>& cps, std::size_t i) {
  if (i > 0 && is_word_char(cps[i - 1])) return false;
  return starts_with_ci(cps, i, "http://") || starts_with_ci(cps, i, "https://") ||
         starts_with_ci(cps, i, "www.");
}

}  // namespace text_detail

/// Normalizes a raw tweet body. Removal order: url spans, #hashtags,
/// @mentions, emoji codepoints, punctuation and symbols. Apostrophes are
/// deleted so contractions stay one token; every other removed codepoint
/// becomes a token boundary. The result is lowercased and whitespace-split.
inline CleanText clean(std::string_view raw) {
  using namespace text_detail;
  const std::vector<UChar32> cps = decode(raw);
  std::vector<UChar32> kept;
  kept.reserve(cps.size());

  std::size_t i = 0;
  while (i < cps.size()) {
    const UChar32 c = cps[i];
    if (url_starts_at(cps, i)) {
      while (i < cps.size() && !is_space(cps[i])) ++i;
      kept.push_back(' ');
      continue;
    }
    const bool sigil = c == '#' || c == 0xFF03 || c == '@' || c == 0xFF20;
    if (sigil && i + 1 < cps.size() && is_word_char(cps[i + 1]) && (i == 0 || !is_word_char(cps[i - 1]))) {
      ++i;
      while (i < cps.size() && is_word_char(cps[i])) ++i;
      kept.push_back(' ');
      continue;
    }
    ++i;
    if (is_emoji(c)) {
      kept.push_back(' ');
    } else if (is_apostrophe(c)) {
      // dropped in place: "don't" -> "dont"
    } else if (u_ispunct(c) || is_strippable_symbol(c) || is_space(c)) {
      kept.push_back(' ');
    } else {
      kept.push_back(u_tolower(c));
    }
  }

  CleanText out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (!out.text.empty()) out.text += ' ';
    out.text += token;
    out.tokens.push_back(std::move(token));
    token.clear();
  };
  for (UChar32 c : kept) {
    if (c == ' ')
      flush();
    else
      append_utf8(token, c);
  }
  flush();
  return out;
}

inline bool passes_length_filter(const CleanText& ct, std::size_t min_tokens = 10) noexcept {
  return ct.token_count() >= min_tokens;
}

/// Case-folded form used for hashtag comparison.
inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (UChar32 c : text_detail::decode(s)) text_detail::append_utf8(out, u_foldCase(c, U_FOLD_CASE_DEFAULT));
  return out;
}

/// Country codes of flag emoji (regional-indicator pairs) in display text,
/// e.g. "Ali 🇵🇰" -> {"PK"}. Unpaired indicators are ignored.
inline std::vector<std::string> extract_flag_codes(std::string_view s) {
  constexpr UChar32 kFirst = 0x1F1E6;
  constexpr UChar32 kLast = 0x1F1FF;
  std::vector<std::string> codes;
  const auto cps = text_detail::decode(s);
  for (std::size_t i = 0; i + 1 < cps.size();) {
    if (cps[i] >= kFirst && cps[i] <= kLast && cps[i + 1] >= kFirst && cps[i + 1] <= kLast) {
      codes.push_back({static_cast<char>('A' + (cps[i] - kFirst)), static_cast<char>('A' + (cps[i + 1] - kFirst))});
      i += 2;
    } else {
      ++i;
    }
  }
  return codes;
}

/// Flag emoji for a two-letter country code ("IN" -> U+1F1EE U+1F1F3).
inline std::string flag_emoji(std::string_view code) {
  std::string out;
  for (char ch : code) {
    const char up = (ch >= 'a' && ch <= 'z') ? static_cast<char>(ch - 32) : ch;
    if (up < 'A' || up > 'Z') return {};
    text_detail::append_utf8(out, 0x1F1E6 + (up - 'A'));
  }
  return out;
}

}  // namespace supportive
