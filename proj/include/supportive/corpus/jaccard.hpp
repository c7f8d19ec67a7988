#pragma once

#include <cstdint>
#include <set>

#include "supportive/error.hpp"

namespace supportive {

/// Exact non-negative fraction num/den.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// |a ∩ b| / |a ∪ b| by a single merge pass over the ordered sets.
template <class T, class Compare, class Alloc>
Ratio jaccard(const std::set<T, Compare, Alloc>& a, const std::set<T, Compare, Alloc>& b) {
  if (a.empty() && b.empty()) throw DataError("jaccard index is undefined for two empty sets");
  const Compare less = a.key_comp();
  std::uint64_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (less(*ia, *ib)) {
      ++ia;
    } else if (less(*ib, *ia)) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return {common, static_cast<std::uint64_t>(a.size() + b.size()) - common};
}

}  // namespace supportive
