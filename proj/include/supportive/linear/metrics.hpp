#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "supportive/error.hpp"

namespace supportive {

/// Positive-class precision, recall and F1 with their confusion counts.
/// Zero denominators report 0.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  double accuracy() const noexcept {
    return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0;
  }
};

inline Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  Metrics m{0.0, 0.0, 0.0, tp, fp, fn, tn};
  if (tp + fp) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

inline Metrics compute_metrics(const std::vector<bool>& predictions, const std::vector<bool>& gold) {
  if (predictions.size() != gold.size())
    throw DataError("predictions and gold labels differ in length (" + std::to_string(predictions.size()) + " vs " +
                    std::to_string(gold.size()) + ")");
  if (gold.empty()) throw DataError("cannot compute metrics on an empty evaluation set");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i];
    const bool g = gold[i];
    if (p && g)
      ++tp;
    else if (p)
      ++fp;
    else if (g)
      ++fn;
    else
      ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

}  // namespace supportive
