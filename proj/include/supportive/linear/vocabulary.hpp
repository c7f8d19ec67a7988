#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "supportive/corpus/text.hpp"
#include "supportive/error.hpp"

namespace supportive {

/// Term index with document frequencies. Indices are dense and follow
/// lexicographic term order, so a given corpus always yields the same layout.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Rebuilds a vocabulary from stored parts (terms must be strictly increasing).
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency, std::size_t n_documents)
      : terms_(std::move(terms)), df_(std::move(document_frequency)), n_documents_(n_documents) {
    if (terms_.size() != df_.size()) throw DataError("vocabulary terms and frequencies differ in length");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i > 0 && !(terms_[i - 1] < terms_[i])) throw DataError("vocabulary terms are not strictly increasing");
      if (df_[i] == 0 || df_[i] > n_documents_) throw DataError("document frequency out of range for '" + terms_[i] + "'");
      index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    }
  }

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t n_documents() const noexcept { return n_documents_; }
  const std::string& term(std::size_t i) const { return terms_.at(i); }
  std::uint32_t document_frequency(std::size_t i) const { return df_.at(i); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint32_t>& document_frequencies() const noexcept { return df_; }

  std::optional<std::uint32_t> index_of(std::string_view t) const {
    auto it = index_.find(std::string(t));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Smoothed idf: ln((1 + N) / (1 + df)) + 1.
  double idf(std::size_t i) const {
    return std::log((1.0 + static_cast<double>(n_documents_)) / (1.0 + static_cast<double>(df_.at(i)))) + 1.0;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::size_t n_documents_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

inline Vocabulary fit_vocabulary(std::span<const CleanText> docs, std::size_t min_df = 1) {
  if (docs.empty()) throw DataError("cannot fit a vocabulary on zero documents");
  std::map<std::string, std::uint32_t> df;
  for (const auto& d : docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : d.tokens)
      if (seen.insert(t).second) ++df[t];
  }
  std::vector<std::string> terms;
  std::vector<std::uint32_t> freq;
  for (auto& [t, n] : df) {
    if (n >= min_df) {
      terms.push_back(t);
      freq.push_back(n);
    }
  }
  if (terms.empty())
    throw DataError("empty vocabulary: no term reaches min_df=" + std::to_string(min_df));
  return Vocabulary(std::move(terms), std::move(freq), docs.size());
}

}  // namespace supportive
