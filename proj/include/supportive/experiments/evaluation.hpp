#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "supportive/error.hpp"
#include "supportive/linear/metrics.hpp"
#include "supportive/linear/model_io.hpp"
#include "supportive/util/jsonl.hpp"
#include "supportive/util/parallel.hpp"
#include "supportive/util/random.hpp"
#include "supportive/util/stats.hpp"
#include "supportive/weaklabel/dataset.hpp"

namespace supportive {

struct ExperimentOptions {
  LossKind kind = LossKind::Hinge;
  std::size_t runs = 5;
  std::uint64_t base_seed = 0;
  double validation_fraction = 0.1;
  std::size_t min_df = 1;
  TrainConfig train;
  std::size_t jobs = 1;

  void validate() const {
    if (runs < 1) throw ConfigError("runs must be at least 1");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
      throw ConfigError("validation fraction must lie in [0, 1)");
    train.validate();
  }
};

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  Metrics validation;  // zero when the validation split is empty
  Metrics test;
};

struct EvalReport {
  std::string model;
  LossKind kind = LossKind::Hinge;
  std::vector<RunResult> runs;
  MeanStd precision;
  MeanStd recall;
  MeanStd f1;
  std::string train_fingerprint;
  std::string eval_fingerprint;
  std::size_t best_run = 0;  // highest validation F1, earliest run on ties
  ScorerModel best_model;

  std::vector<std::uint64_t> seeds() const {
    std::vector<std::uint64_t> s;
    for (const auto& r : runs) s.push_back(r.seed);
    return s;
  }
};

namespace experiment_detail {

inline std::vector<bool> labels_of(const std::vector<const Example*>& xs) {
  std::vector<bool> out;
  out.reserve(xs.size());
  for (const auto* e : xs) out.push_back(*e->label == Label::Supportive);
  return out;
}

inline std::vector<bool> predict_all(const ScorerModel& m, const std::vector<const Example*>& xs) {
  std::vector<bool> out;
  out.reserve(xs.size());
  for (const auto* e : xs) out.push_back(predict(m.model, vectorize(e->text, m.vocabulary)));
  return out;
}

inline void summarize(EvalReport& r) {
  std::vector<double> p, rc, f;
  for (const auto& run : r.runs) {
    p.push_back(run.test.precision);
    rc.push_back(run.test.recall);
    f.push_back(run.test.f1);
  }
  r.precision = summarize_runs(p);
  r.recall = summarize_runs(rc);
  r.f1 = summarize_runs(f);
}

}  // namespace experiment_detail

/// Trains `runs` linear models on `train` (seeds base_seed + i; each run
/// draws its own train/validation split) and scores each on the fixed
/// evaluation set. Precision, recall and F1 are for the supportive class;
/// the spread across runs is the sample standard deviation.
inline EvalReport run_experiment(const std::string& model_name, const WeakDataset& train_set,
                                 const WeakDataset& eval_set, const ExperimentOptions& opt) {
  using namespace experiment_detail;
  opt.validate();
  if (auto missing = eval_set.unlabeled_ids(); !missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? "," : "") + missing[i];
    if (missing.size() > 10) list += ",...";
    throw DataError("evaluation set has " + std::to_string(missing.size()) + " unlabeled rows: " + list);
  }
  if (eval_set.examples.empty()) throw DataError("evaluation set is empty");

  std::vector<const Example*> labeled;
  for (const auto& e : train_set.examples)
    if (e.label) labeled.push_back(&e);
  if (labeled.empty()) throw DataError("training set '" + model_name + "' has no labeled rows");
  std::vector<const Example*> test;
  for (const auto& e : eval_set.examples) test.push_back(&e);
  const auto gold = labels_of(test);

  EvalReport report;
  report.model = model_name;
  report.kind = opt.kind;
  report.train_fingerprint = train_set.fingerprint();
  report.eval_fingerprint = eval_set.fingerprint();
  report.runs.resize(opt.runs);
  std::vector<ScorerModel> models(opt.runs);

  // Runs are independent; each writes only its own slot.
  parallel_chunks(opt.runs, 1, opt.jobs, [&](std::size_t i, std::size_t, std::size_t) {
    RunResult& run = report.runs[i];
    run.seed = opt.base_seed + i;
    std::vector<const Example*> order = labeled;
    Rng rng = make_rng(derive_seed(run.seed, 0x5b17));
    shuffle(std::span<const Example*>(order), rng);
    const auto n_val = static_cast<std::size_t>(opt.validation_fraction * static_cast<double>(order.size()));
    std::vector<const Example*> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<const Example*> fit(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

    std::vector<CleanText> docs;
    docs.reserve(fit.size());
    for (const auto* e : fit) docs.push_back(e->text);
    ScorerModel& m = models[i];
    m.vocabulary = fit_vocabulary(docs, opt.min_df);
    std::vector<LabeledVector> data;
    data.reserve(fit.size());
    for (const auto* e : fit) data.push_back({vectorize(e->text, m.vocabulary), *e->label == Label::Supportive});
    m.model = train(data, opt.kind, run.seed, opt.train);

    run.n_train = fit.size();
    run.n_validation = val.size();
    if (!val.empty()) run.validation = compute_metrics(predict_all(m, val), labels_of(val));
    run.test = compute_metrics(predict_all(m, test), gold);
  });

  for (std::size_t i = 1; i < report.runs.size(); ++i)
    if (report.runs[i].validation.f1 > report.runs[report.best_run].validation.f1) report.best_run = i;
  report.best_model = std::move(models[report.best_run]);
  summarize(report);
  return report;
}

/// Recomputes the aggregates from the stored runs (self-consistency check).
inline EvalReport resummarized(EvalReport r) {
  experiment_detail::summarize(r);
  return r;
}

// ---------------------------------------------------------------------------
// Report output. Values are percentages with two decimals in the TSV and raw
// fractions in the JSONL.

inline std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
  return buf;
}

inline void write_eval_reports(const std::filesystem::path& tsv, const std::filesystem::path& jsonl,
                               const std::vector<EvalReport>& reports, const json& provenance) {
  {
    auto out = open_output(tsv);
    out << "# provenance " << provenance.dump() << '\n';
    out << "# std: sample standard deviation across runs\n";
    out << "model\tkind\truns\tprecision\tprecision_std\trecall\trecall_std\tf1\tf1_std\n";
    for (const auto& r : reports)
      out << r.model << '\t' << to_string(r.kind) << '\t' << r.runs.size() << '\t' << percent(r.precision.mean) << '\t'
          << percent(r.precision.std) << '\t' << percent(r.recall.mean) << '\t' << percent(r.recall.std) << '\t'
          << percent(r.f1.mean) << '\t' << percent(r.f1.std) << '\n';
  }
  auto out = open_output(jsonl);
  write_json_line(out, json{{"provenance", provenance}});
  for (const auto& r : reports) {
    json runs = json::array();
    for (const auto& run : r.runs)
      runs.push_back({{"seed", run.seed},
                      {"n_train", run.n_train},
                      {"n_validation", run.n_validation},
                      {"validation_f1", run.validation.f1},
                      {"precision", run.test.precision},
                      {"recall", run.test.recall},
                      {"f1", run.test.f1},
                      {"tp", run.test.tp},
                      {"fp", run.test.fp},
                      {"fn", run.test.fn},
                      {"tn", run.test.tn}});
    write_json_line(out, json{{"model", r.model},
                              {"kind", to_string(r.kind)},
                              {"precision", {{"mean", r.precision.mean}, {"std", r.precision.std}}},
                              {"recall", {{"mean", r.recall.mean}, {"std", r.recall.std}}},
                              {"f1", {{"mean", r.f1.mean}, {"std", r.f1.std}}},
                              {"seeds", r.seeds()},
                              {"best_run", r.best_run},
                              {"train_fingerprint", r.train_fingerprint},
                              {"eval_fingerprint", r.eval_fingerprint},
                              {"runs", runs}});
  }
}

}  // namespace supportive
