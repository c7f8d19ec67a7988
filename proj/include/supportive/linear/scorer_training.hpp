#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "supportive/corpus/text.hpp"
#include "supportive/linear/metrics.hpp"
#include "supportive/linear/model_io.hpp"
#include "supportive/util/jsonl.hpp"
#include "supportive/util/random.hpp"

namespace supportive {

/// One example of a scorer's seed dataset (hope-speech or empathy-distress
/// format): raw text plus a binary label.
struct SeedExample {
  std::string text;
  bool positive = false;
};

/// Line-delimited {"text": ..., "label": 0|1|true|false}.
inline std::vector<SeedExample> load_seed_dataset(const std::filesystem::path& path) {
  std::vector<SeedExample> out;
  read_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      SeedExample ex;
      ex.text = j.at("text").get<std::string>();
      const auto& label = j.at("label");
      if (label.is_boolean())
        ex.positive = label.get<bool>();
      else if (label.is_number_integer() && (label.get<int>() == 0 || label.get<int>() == 1))
        ex.positive = label.get<int>() == 1;
      else
        throw DataError("label must be 0/1");
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  if (out.empty()) throw DataError("seed dataset '" + path.string() + "' is empty");
  return out;
}

inline void write_seed_dataset(const std::filesystem::path& path, const std::vector<SeedExample>& examples) {
  auto out = open_output(path);
  for (const auto& ex : examples) write_json_line(out, json{{"text", ex.text}, {"label", ex.positive ? 1 : 0}});
}

struct ScorerTrainingOptions {
  LossKind kind = LossKind::Logistic;
  TrainConfig train;
  std::size_t min_df = 1;
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
};

struct ScorerTrainingResult {
  ScorerModel scorer;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double held_out_accuracy = 0.0;
  double majority_rate = 0.0;  // accuracy of always predicting the larger test class
  Metrics held_out;
};

/// Cleans the seed texts, makes a seeded train/test split, fits the
/// vocabulary on the training part only, and trains a built-in scorer.
inline ScorerTrainingResult train_scorer(const std::vector<SeedExample>& examples, const ScorerTrainingOptions& opt) {
  if (!(opt.train_fraction > 0.0 && opt.train_fraction < 1.0))
    throw ConfigError("train_fraction must lie in (0, 1)");
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = make_rng(derive_seed(opt.seed, 0x5eed));
  shuffle(std::span<std::size_t>(order), rng);
  const auto n_train = static_cast<std::size_t>(opt.train_fraction * static_cast<double>(examples.size()));
  if (n_train == 0 || n_train == examples.size()) throw InsufficientDataError("seed dataset too small to split");

  std::vector<CleanText> train_docs;
  std::vector<bool> train_labels;
  std::vector<CleanText> test_docs;
  std::vector<bool> test_labels;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& ex = examples[order[k]];
    (k < n_train ? train_docs : test_docs).push_back(clean(ex.text));
    (k < n_train ? train_labels : test_labels).push_back(ex.positive);
  }

  ScorerTrainingResult result;
  result.scorer.vocabulary = fit_vocabulary(train_docs, opt.min_df);
  std::vector<LabeledVector> data;
  data.reserve(train_docs.size());
  for (std::size_t i = 0; i < train_docs.size(); ++i)
    data.push_back({vectorize(train_docs[i], result.scorer.vocabulary), train_labels[i]});
  result.scorer.model = train(data, opt.kind, opt.seed, opt.train);

  std::vector<bool> predicted;
  predicted.reserve(test_docs.size());
  for (const auto& d : test_docs) predicted.push_back(predict(result.scorer.model, vectorize(d, result.scorer.vocabulary)));
  result.held_out = compute_metrics(predicted, test_labels);
  result.held_out_accuracy = result.held_out.accuracy();
  std::size_t positives = 0;
  for (bool b : test_labels) positives += b;
  const std::size_t larger = std::max(positives, test_labels.size() - positives);
  result.majority_rate = static_cast<double>(larger) / static_cast<double>(test_labels.size());
  result.n_train = train_docs.size();
  result.n_test = test_docs.size();
  return result;
}

}  // namespace supportive
