#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "supportive/error.hpp"
#include "supportive/linear/sparse.hpp"
#include "supportive/util/random.hpp"

namespace supportive {

enum class LossKind { Logistic, Hinge };

inline std::string_view to_string(LossKind k) noexcept { return k == LossKind::Logistic ? "logistic" : "hinge"; }

inline std::optional<LossKind> parse_loss_kind(std::string_view s) {
  if (s == "logistic") return LossKind::Logistic;
  if (s == "hinge" || s == "svm") return LossKind::Hinge;
  return std::nullopt;
}

struct TrainConfig {
  std::size_t epochs = 20;
  double learning_rate = 0.1;
  double l2 = 1e-4;

  void validate() const {
    if (epochs == 0) throw ConfigError("epochs must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(l2 >= 0.0) || learning_rate * l2 >= 1.0) throw ConfigError("l2 must satisfy 0 <= l2 < 1/learning_rate");
  }
};

struct LabeledVector {
  SparseVector x;
  bool positive = false;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  LossKind kind = LossKind::Logistic;
  std::uint64_t training_seed = 0;
  TrainConfig config;

  std::size_t dim() const noexcept { return weights.size(); }

  double decision(const SparseVector& v) const {
    if (v.dim != weights.size())
      throw DimensionMismatchError("vector dimension " + std::to_string(v.dim) + " does not match model dimension " +
                                   std::to_string(weights.size()));
    return v.dot(weights) + bias;
  }
};

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace linear_detail {

inline double loss(LossKind kind, double margin) {
  if (kind == LossKind::Hinge) return margin < 1.0 ? 1.0 - margin : 0.0;
  return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

// -d loss / d margin
inline double neg_dloss(LossKind kind, double margin) {
  if (kind == LossKind::Hinge) return margin < 1.0 ? 1.0 : 0.0;
  return sigmoid(-margin);
}

}  // namespace linear_detail

/// Seeded stochastic (sub)gradient descent on the L2-regularized logistic or
/// hinge loss. Step size eta_t = lr / (1 + lr * l2 * t) over the global step
/// counter t; the bias is not regularized. Each epoch visits the data in a
/// fresh seeded permutation, so a run of e epochs is a prefix of a longer run.
inline LinearModel train(std::span<const LabeledVector> data, LossKind kind, std::uint64_t seed,
                         const TrainConfig& config = {}) {
  config.validate();
  if (data.empty()) throw DegenerateTrainingError("no training examples");
  const std::size_t dim = data.front().x.dim;
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& ex : data) {
    if (ex.x.dim != dim) throw DimensionMismatchError("training vectors have inconsistent dimensions");
    (ex.positive ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw DegenerateTrainingError("training data contains a single class");

  std::vector<double> v(dim, 0.0);
  double scale = 1.0;  // weights = scale * v
  double bias = 0.0;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  std::uint64_t t = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      const auto& ex = data[i];
      const double y = ex.positive ? 1.0 : -1.0;
      const double eta = config.learning_rate / (1.0 + config.learning_rate * config.l2 * static_cast<double>(t));
      const double margin = y * (scale * ex.x.dot(v) + bias);
      const double g = linear_detail::neg_dloss(kind, margin);
      scale *= 1.0 - eta * config.l2;
      if (g != 0.0) {
        const double step = eta * g * y;
        for (const auto& [j, w] : ex.x.entries) v[j] += step / scale * w;
        bias += step;
      }
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
      ++t;
    }
  }

  LinearModel model;
  model.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) model.weights[j] = scale * v[j];
  model.bias = bias;
  model.kind = kind;
  model.training_seed = seed;
  model.config = config;
  return model;
}

/// Mean loss of the model's kind plus (l2 / 2) * ||w||^2.
inline double regularized_loss(const LinearModel& model, std::span<const LabeledVector> data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : data) {
    const double y = ex.positive ? 1.0 : -1.0;
    total += linear_detail::loss(model.kind, y * model.decision(ex.x));
  }
  double ww = 0.0;
  for (double w : model.weights) ww += w * w;
  return total / static_cast<double>(data.size()) + 0.5 * model.config.l2 * ww;
}

/// sigmoid(w·v + b). For hinge models this is an uncalibrated, monotone
/// squashing of the margin, fit for ranking but not for probability reporting.
inline double predict_proba(const LinearModel& model, const SparseVector& v) { return sigmoid(model.decision(v)); }

/// Threshold 0.5 with ties classified positive.
inline bool predict(const LinearModel& model, const SparseVector& v) { return predict_proba(model, v) >= 0.5; }

}  // namespace supportive
