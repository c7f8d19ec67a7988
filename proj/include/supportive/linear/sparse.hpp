#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "supportive/linear/vocabulary.hpp"

namespace supportive {

struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;  // strictly increasing indices

  bool empty() const noexcept { return entries.empty(); }

  double norm() const {
    double ss = 0.0;
    for (const auto& [i, w] : entries) ss += w * w;
    return std::sqrt(ss);
  }

  double dot(std::span<const double> dense) const {
    double s = 0.0;
    for (const auto& [i, w] : entries) s += dense[i] * w;
    return s;
  }
};

/// TF-IDF with raw term counts, smoothed idf, and L2 normalization.
/// Out-of-vocabulary terms are ignored; no known terms gives the zero vector.
inline SparseVector vectorize(const CleanText& doc, const Vocabulary& vocab) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& t : doc.tokens)
    if (auto i = vocab.index_of(t)) ++counts[*i];

  SparseVector v;
  v.dim = vocab.size();
  v.entries.reserve(counts.size());
  double ss = 0.0;
  for (const auto& [i, tf] : counts) {
    const double w = static_cast<double>(tf) * vocab.idf(i);
    v.entries.emplace_back(i, w);
    ss += w * w;
  }
  if (ss > 0.0) {
    const double inv = 1.0 / std::sqrt(ss);
    for (auto& e : v.entries) e.second *= inv;
  }
  return v;
}

}  // namespace supportive
