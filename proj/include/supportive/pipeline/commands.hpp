#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "supportive/agreement/annotation.hpp"
#include "supportive/corpus/corpus.hpp"
#include "supportive/corpus/country.hpp"
#include "supportive/corpus/partition.hpp"
#include "supportive/experiments/analytics.hpp"
#include "supportive/experiments/evaluation.hpp"
#include "supportive/linear/scorer_training.hpp"
#include "supportive/pipeline/artifacts.hpp"
#include "supportive/pipeline/config.hpp"
#include "supportive/scoring/hub.hpp"
#include "supportive/util/parallel.hpp"
#include "supportive/weaklabel/informed.hpp"
#include "supportive/weaklabel/pair_rate.hpp"
#include "supportive/weaklabel/sampling.hpp"

namespace supportive::pipeline {

/// Inputs that only make sense on the command line.
struct CommandOptions {
  std::optional<fs::path> sheet;       // kappa/adjudicate: round-N annotation sheet
  std::vector<fs::path> revisions;     // adjudicate: later-round sheets
};

namespace command_detail {

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline json side_counts(const CorpusPartition& p) {
  return json{{"supportive", p.supportive.size()},
              {"not-supportive", p.not_supportive.size()},
              {"discarded", p.discarded.size()},
              {"unmatched", p.unmatched.size()}};
}

inline std::vector<TextItem> scoring_items(const CorpusPartition& filtered, const TextIndex& texts) {
  std::vector<TextItem> items;
  for (const auto& id : filtered.labeled_union()) items.push_back({id, text_of(texts, id)});
  return items;
}

inline ScoreTable load_scores(const PipelineConfig& cfg, std::string& fingerprint) {
  const auto path = require(cfg, artifact::kScores, "score");
  fingerprint = fingerprint_file(path.string());
  return read_score_table(path);
}

inline void check_covers(const ScoreTable& table, const CorpusPartition& filtered) {
  if (!table.covers(filtered.supportive) || !table.covers(filtered.not_supportive))
    throw DataError("score table does not cover the current partition; rerun 'score'");
}

inline WeakDataset load_dataset(const PipelineConfig& cfg, const char* rel, const char* producer) {
  return read_dataset(require(cfg, rel, producer));
}

/// Eval ids withheld from weak-label pools, or nullptr when exclusion is off.
inline std::unique_ptr<IdSet> eval_exclusion(const PipelineConfig& cfg) {
  if (!cfg.exclude_eval) return nullptr;
  return std::make_unique<IdSet>(load_dataset(cfg, artifact::kEvalSample, "sample-eval").ids());
}

inline std::vector<std::string> command_for(const PipelineConfig& cfg, const std::vector<std::string>& cmd) {
  std::vector<std::string> out = cmd;
  // A program given as a relative path is relative to the config file.
  if (!out.empty() && out[0].find('/') != std::string::npos && fs::path(out[0]).is_relative())
    out[0] = (cfg.base_dir / out[0]).lexically_normal().string();
  return out;
}

inline std::vector<NamedGroup> named_groups(const std::vector<HashtagGroup>& groups, std::vector<IdSet> members) {
  std::vector<NamedGroup> out;
  for (std::size_t g = 0; g < groups.size(); ++g) out.push_back({groups[g].group_id, std::move(members[g])});
  return out;
}

inline json mean_std_json(const std::optional<MeanStd>& m) {
  if (!m) return nullptr;
  return json{{"mean", m->mean}, {"std", m->std}};
}

inline std::string mean_std_cell(const std::optional<MeanStd>& m) {
  return m ? fixed(m->mean, 2) + "\t" + fixed(m->std, 2) : std::string("\t");
}

inline void write_engagement(Outputs& outs, const char* tsv, const char* jsonl, const std::vector<EngagementRow>& rows,
                             const json& provenance) {
  {
    auto out = open_output(outs.path(tsv));
    write_tsv_provenance(out, provenance);
    out << "# std: population standard deviation\n";
    out << "group\tcountry\tcount\tshare\tlike_mean\tlike_std\tretweet_mean\tretweet_std\n";
    for (const auto& r : rows)
      out << r.group << '\t' << to_string(r.bucket) << '\t' << r.count << '\t' << fixed(100.0 * r.share, 2) << '\t'
          << mean_std_cell(r.likes) << '\t' << mean_std_cell(r.retweets) << '\n';
  }
  auto out = open_output(outs.path(jsonl));
  write_json_line(out, json{{"provenance", provenance}});
  for (const auto& r : rows)
    write_json_line(out, json{{"group", r.group},
                              {"country", to_string(r.bucket)},
                              {"count", r.count},
                              {"share", r.share},
                              {"likes", mean_std_json(r.likes)},
                              {"retweets", mean_std_json(r.retweets)}});
}

}  // namespace command_detail

// ---------------------------------------------------------------------------

inline void cmd_ingest(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  const auto corpus_path = cfg.resolve(cfg.corpus);
  const Corpus corpus = load_corpus(corpus_path, cfg.mapping);
  load_groups(cfg.resolve(cfg.groups));  // fail early on a bad group file

  const auto& records = corpus.records();
  std::vector<IngestedTweet> rows(records.size());
  parallel_chunks(records.size(), 2048, cfg.jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = records[i];
      auto& t = rows[i];
      t.id = r.id;
      t.text = clean(r.raw_text);
      t.passes = passes_length_filter(t.text, cfg.min_tokens);
      t.hashtags = r.hashtags;
      t.likes = r.like_count;
      t.retweets = r.retweet_count;
      t.country = infer_country(r);
    }
  });

  std::size_t passing = 0, inconsistent = 0, agreeing = 0;
  std::map<std::string, std::size_t> by_country, by_source;
  for (const auto& t : rows) {
    passing += t.passes;
    ++by_country[std::string(to_string(t.country.value))];
    ++by_source[std::string(to_string(t.country.source))];
    if (t.country.source == CountrySource::Both) (t.country.consistent ? agreeing : inconsistent) += 1;
  }
  json skipped = json::array();
  for (std::size_t i = 0; i < corpus.issues().size() && i < 20; ++i)
    skipped.push_back({{"line", corpus.issues()[i].line}, {"reason", corpus.issues()[i].reason}});

  json prov = cfg.provenance("ingest");
  prov["corpus_fingerprint"] = fingerprint_file(corpus_path.string());
  prov["records"] = rows.size();
  prov["skipped"] = corpus.skipped();
  prov["skipped_examples"] = skipped;
  prov["min_tokens"] = cfg.min_tokens;
  prov["passing_filter"] = passing;
  prov["countries"] = by_country;
  prov["country_sources"] = by_source;
  prov["geo_emoji_agree"] = agreeing;
  prov["geo_emoji_disagree"] = inconsistent;

  Outputs outs(cfg, "ingest");
  {
    auto out = open_output(outs.path(artifact::kIngest));
    write_json_line(out, json{{"provenance", prov}});
    for (const auto& t : rows) write_json_line(out, ingested_to_json(t));
  }
  outs.commit();
  log << "ingest: " << rows.size() << " records, " << corpus.skipped() << " skipped, " << passing
      << " with >= " << cfg.min_tokens << " tokens; geo/flag disagreements: " << inconsistent << '\n';
}

inline void cmd_partition(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  using namespace command_detail;
  const auto ingested = load_ingested(cfg);
  const auto groups = load_groups(cfg.resolve(cfg.groups));
  const CorpusPartition part = partition(ingested.tweets, groups);
  std::unordered_map<std::string, bool> passes;
  for (const auto& t : ingested.tweets) passes.emplace(t.id, t.passes);
  const CorpusPartition filtered = part.restricted([&](const std::string& id) { return passes.at(id); });
  if (part.size() != ingested.tweets.size()) throw DataError("partition is not exhaustive over the corpus");

  json group_list = json::array();
  for (const auto& g : groups)
    group_list.push_back({{"group", g.group_id}, {"polarity", to_string(g.polarity)}, {"variants", g.variants}});
  json prov = cfg.provenance("partition");
  prov["ingest_fingerprint"] = ingested.file_fingerprint;
  prov["corpus_fingerprint"] = ingested.corpus_fingerprint;
  prov["groups"] = group_list;
  prov["all"] = side_counts(part);
  prov["filtered"] = side_counts(filtered);

  Outputs outs(cfg, "partition");
  {
    auto out = open_output(outs.path(artifact::kPartition));
    write_json_line(out, json{{"provenance", prov}});
    for (const auto& t : ingested.tweets)
      write_json_line(out, json{{"id", t.id}, {"side", to_string(*part.side_of(t.id))}, {"passes_filter", t.passes}});
  }
  outs.commit();
  log << "partition: supportive " << part.supportive.size() << " (" << filtered.supportive.size()
      << " filtered), not-supportive " << part.not_supportive.size() << " (" << filtered.not_supportive.size()
      << "), discarded " << part.discarded.size() << ", unmatched " << part.unmatched.size() << '\n';
}

inline void cmd_train_scorer(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  Outputs outs(cfg, "train-scorer");
  json prov = cfg.provenance("train-scorer");
  std::vector<json> rows;
  for (const auto& spec : cfg.scorers) {
    if (spec.external || spec.train.empty()) continue;
    const auto train_path = cfg.resolve(spec.train);
    const auto examples = load_seed_dataset(train_path);
    ScorerTrainingOptions opt;
    opt.kind = spec.kind;
    opt.train = cfg.train;
    opt.min_df = cfg.min_df;
    opt.train_fraction = cfg.scorer_train_fraction;
    opt.seed = stream_seed(cfg.seed, "train-scorer/" + spec.name);
    auto result = train_scorer(examples, opt);

    std::size_t positives = 0;
    for (const auto& e : examples) positives += e.positive;
    json row{{"scorer", spec.name},
             {"kind", to_string(spec.kind)},
             {"seed", opt.seed},
             {"train_file_fingerprint", fingerprint_file(train_path.string())},
             {"examples", examples.size()},
             {"positives", positives},
             {"n_train", result.n_train},
             {"n_test", result.n_test},
             {"held_out_accuracy", result.held_out_accuracy},
             {"majority_rate", result.majority_rate},
             {"precision", result.held_out.precision},
             {"recall", result.held_out.recall},
             {"f1", result.held_out.f1}};
    json model_prov = prov;
    model_prov["scorer"] = row;
    result.scorer.provenance = model_prov.dump();
    save_scorer_model(outs.path(artifact::scorer_model(spec.name)), result.scorer);
    log << "train-scorer " << spec.name << ": held-out accuracy " << command_detail::fixed(result.held_out_accuracy, 4)
        << " (majority " << command_detail::fixed(result.majority_rate, 4) << ", " << result.n_train << "/"
        << result.n_test << " split)\n";
    rows.push_back(std::move(row));
  }
  auto out = open_output(outs.path(artifact::kScorerTraining));
  write_json_line(out, json{{"provenance", prov}});
  for (const auto& r : rows) write_json_line(out, r);
  out.close();
  outs.commit();
  if (rows.empty()) log << "train-scorer: no built-in scorer with training data configured\n";
}

inline void cmd_score(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  using namespace command_detail;
  if (cfg.scorers.empty()) throw ConfigError("no scorers configured");
  const auto ingested = load_ingested(cfg);
  const auto part = load_partition(cfg);
  const auto items = scoring_items(part.filtered, ingested.texts());

  ScorerHub hub;
  json versions = json::object();
  for (const auto& spec : cfg.scorers) {
    std::unique_ptr<Scorer> scorer;
    if (spec.external) {
      ExternalScorerOptions opt;
      opt.command = command_for(cfg, spec.command);
      opt.timeout = std::chrono::milliseconds(spec.timeout_ms);
      opt.batch_size = spec.batch_size;
      opt.workers = spec.workers;
      opt.declared_version = spec.version;
      scorer = std::make_unique<ExternalScorer>(spec.name, std::move(opt));
    } else {
      const auto path = spec.model ? cfg.resolve(*spec.model) : require(cfg, artifact::scorer_model(spec.name), "train-scorer");
      scorer = std::make_unique<BuiltinScorer>(load_scorer_model(path));
    }
    versions[spec.name] = spec.external ? json{{"type", "external"}, {"command", spec.command}, {"version", spec.version}}
                                        : json{{"type", "builtin"}, {"version", scorer->version()}};
    hub.add(spec.name, std::move(scorer));
  }
  const ScoreCache cache(cfg.cache());
  const auto table = hub.score_corpus(items, {cfg.jobs, &cache});

  json prov = cfg.provenance("score");
  prov["partition_fingerprint"] = part.file_fingerprint;
  prov["ingest_fingerprint"] = ingested.file_fingerprint;
  prov["scorer_versions"] = versions;
  Outputs outs(cfg, "score");
  write_score_table(outs.path(artifact::kScores), table, prov);
  outs.commit();
  log << "score: " << items.size() << " tweets x " << hub.size() << " scorers\n";
}

inline void cmd_sample_eval(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  const auto ingested = load_ingested(cfg);
  const auto part = load_partition(cfg);
  const auto seed = stream_seed(cfg.seed, "sample-eval");
  const auto ds = build_eval_sample(part.filtered, ingested.texts(), cfg.eval_n, seed);

  json prov = cfg.provenance("sample-eval");
  prov["partition_fingerprint"] = part.file_fingerprint;
  prov["sample_seed"] = seed;
  Outputs outs(cfg, "sample-eval");
  write_dataset(outs.path(artifact::kEvalSample), ds, prov);

  AnnotationMatrix sheet;
  sheet.annotators = cfg.annotators;
  sheet.round = 1;
  for (const auto& e : ds.examples)
    sheet.add(e.id, e.text.text, std::vector<std::optional<std::string>>(cfg.annotators));
  const auto sheet_rel = sheet_path("", artifact::kEvalSheetStem, 1).string();
  write_sheet(outs.path(sheet_rel), sheet, prov);
  outs.commit();
  log << "sample-eval: " << ds.examples.size() << " tweets; annotate " << sheet_rel << " (labels: "
      << to_string(Label::Supportive) << " / " << to_string(Label::NotSupportive) << ")\n";
}

inline void cmd_build_informed(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  using namespace command_detail;
  const auto ingested = load_ingested(cfg);
  const auto part = load_partition(cfg);
  std::string scores_fp;
  const auto table = load_scores(cfg, scores_fp);
  const auto exclude = eval_exclusion(cfg);
  check_covers(table, part.filtered);

  InformedConfig ic;
  ic.top_k = cfg.top_k;
  ic.neg_per_list = cfg.neg_per_list;
  ic.bottom_frac = cfg.bottom_frac;
  ic.seed = stream_seed(cfg.seed, "build-informed");
  ic.hope_scorer = cfg.hope_scorer;
  ic.empathy_scorer = cfg.empathy_scorer;
  const auto result = build_informed(table, part.filtered, ingested.texts(), ic, exclude.get());

  json prov = cfg.provenance("build-informed");
  prov["scores_fingerprint"] = scores_fp;
  prov["partition_fingerprint"] = part.file_fingerprint;
  prov["stats"] = result.stats.to_json();
  Outputs outs(cfg, "build-informed");
  write_dataset(outs.path(artifact::kInformed), result.dataset, prov);
  outs.commit();
  log << "build-informed: " << result.dataset.count(Label::Supportive) << " positives (of "
      << result.stats.positive_candidates << "), " << result.dataset.count(Label::NotSupportive) << " negatives (of "
      << result.stats.negative_candidates << ")\n";
}

inline void cmd_build_hashtag_baseline(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  using namespace command_detail;
  const auto ingested = load_ingested(cfg);
  const auto part = load_partition(cfg);
  std::size_t n_pos = 0, n_neg = 0;
  json mirror = nullptr;
  if (cfg.baseline_n_pos && cfg.baseline_n_neg) {
    n_pos = *cfg.baseline_n_pos;
    n_neg = *cfg.baseline_n_neg;
  } else {
    const auto informed_path = require(cfg, artifact::kInformed, "build-informed");
    const auto informed = read_dataset(informed_path);
    n_pos = cfg.baseline_n_pos.value_or(informed.count(Label::Supportive));
    n_neg = cfg.baseline_n_neg.value_or(informed.count(Label::NotSupportive));
    mirror = fingerprint_file(informed_path.string());
  }
  const auto exclude = eval_exclusion(cfg);
  const auto seed = stream_seed(cfg.seed, "build-hashtag-baseline");
  const auto ds = build_hashtag_baseline(part.filtered, ingested.texts(), n_pos, n_neg, seed, exclude.get());

  json prov = cfg.provenance("build-hashtag-baseline");
  prov["partition_fingerprint"] = part.file_fingerprint;
  prov["mirrors_informed"] = mirror;
  Outputs outs(cfg, "build-hashtag-baseline");
  write_dataset(outs.path(artifact::kHashtag), ds, prov);
  outs.commit();
  log << "build-hashtag-baseline: " << n_pos << " positives, " << n_neg << " negatives\n";
}

inline void cmd_pair_rate(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  using namespace command_detail;
  const auto part = load_partition(cfg);
  std::string scores_fp;
  const auto table = load_scores(cfg, scores_fp);
  check_covers(table, part.filtered);

  json prov = cfg.provenance("pair-rate");
  prov["scores_fingerprint"] = scores_fp;
  prov["n_pairs"] = cfg.n_pairs;
  prov["runs"] = cfg.pair_runs;
  prov["base_seed"] = cfg.seed;
  std::vector<RepeatedRate> results;
  for (const auto& name : table.scorers())
    results.push_back(repeated_rate(table, part.filtered, name, cfg.n_pairs, cfg.seed, cfg.pair_runs, cfg.jobs));

  Outputs outs(cfg, "pair-rate");
  {
    auto out = open_output(outs.path(artifact::kPairRateTsv));
    write_tsv_provenance(out, prov);
    out << "# rate in percent; std: sample standard deviation across runs\n";
    out << "scorer\truns\tn_pairs\tmean\tstd\n";
    for (std::size_t s = 0; s < results.size(); ++s)
      out << table.scorers()[s] << '\t' << cfg.pair_runs << '\t' << cfg.n_pairs << '\t'
          << fixed(100.0 * results[s].summary.mean, 2) << '\t' << fixed(100.0 * results[s].summary.std, 2) << '\n';
  }
  auto out = open_output(outs.path(artifact::kPairRateJsonl));
  write_json_line(out, json{{"provenance", prov}});
  for (std::size_t s = 0; s < results.size(); ++s) {
    json runs = json::array();
    for (const auto& r : results[s].runs)
      runs.push_back({{"seed", r.seed}, {"wins", r.wins}, {"n_pairs", r.n_pairs}, {"rate", r.rate}});
    write_json_line(out, json{{"scorer", table.scorers()[s]},
                              {"mean", results[s].summary.mean},
                              {"std", results[s].summary.std},
                              {"runs", runs}});
    log << "pair-rate " << table.scorers()[s] << ": " << fixed(100.0 * results[s].summary.mean, 2) << " +/- "
        << fixed(100.0 * results[s].summary.std, 2) << "%\n";
  }
  out.close();
  outs.commit();
}

namespace command_detail {

struct RoundSummary {
  int round = 0;
  std::string sheet_fingerprint;
  double kappa = 0.0;
  std::size_t items = 0;
  std::size_t unanimous = 0;
  std::size_t majority = 0;
  std::size_t unresolved = 0;
  std::size_t supportive = 0;
  std::size_t not_supportive = 0;
};

inline RoundSummary summarize_round(const AnnotationMatrix& m, const std::vector<GoldLabel>& gold,
                                    std::string sheet_fingerprint) {
  RoundSummary s;
  s.round = m.round;
  s.sheet_fingerprint = std::move(sheet_fingerprint);
  s.kappa = fleiss_kappa(m);
  s.items = m.items();
  for (const auto& g : gold) {
    s.unanimous += g.resolution == Resolution::Unanimous;
    s.majority += g.resolution == Resolution::Majority;
    s.unresolved += g.resolution == Resolution::Unresolved;
    if (g.label) {
      const auto l = parse_label(*g.label);
      s.supportive += l == Label::Supportive;
      s.not_supportive += l == Label::NotSupportive;
    }
  }
  return s;
}

inline void check_labels(const AnnotationMatrix& m, const fs::path& sheet) {
  for (std::size_t i = 0; i < m.items(); ++i)
    for (const auto& l : m.labels[i])
      if (l && !parse_label(*l))
        throw DataError(sheet.string() + ": item '" + m.ids[i] + "' has unknown label '" + *l + "'; use " +
                        std::string(to_string(Label::Supportive)) + " or " + std::string(to_string(Label::NotSupportive)));
}

inline fs::path annotation_sheet(const PipelineConfig& cfg, const CommandOptions& opt) {
  if (opt.sheet) return fs::absolute(*opt.sheet);
  if (cfg.annotation_sheet) return cfg.resolve(*cfg.annotation_sheet);
  throw ConfigError("no annotation sheet: pass --sheet or set eval.annotation_sheet (fill in the sheet written by "
                    "'sample-eval')");
}

/// Shared by kappa (base round only) and adjudicate (base plus revisions).
inline void agreement(const PipelineConfig& cfg, const CommandOptions& opt, const std::vector<fs::path>& revisions,
                      const std::string& command, std::ostream& log) {
  const auto eval = load_dataset(cfg, artifact::kEvalSample, "sample-eval");
  const auto base_path = annotation_sheet(cfg, opt);
  if (!fs::exists(base_path))
    throw IoError("annotation sheet '" + base_path.filename().string() + "' not found; annotate the sheet written by " +
                  "'sample-eval'");
  AnnotationMatrix m = read_sheet(base_path);
  check_labels(m, base_path);
  if (m.annotators < 2) throw DataError(base_path.string() + ": a sheet needs at least 2 annotator columns");

  const IdSet sheet_ids(m.ids.begin(), m.ids.end());
  if (sheet_ids != eval.ids() || sheet_ids.size() != m.items())
    throw DataError("annotation sheet ids do not match the evaluation sample (" + std::to_string(m.items()) +
                    " sheet rows, " + std::to_string(eval.examples.size()) + " sampled); rerun 'sample-eval' or fix the sheet");

  std::vector<RoundSummary> rounds;
  rounds.push_back(summarize_round(m, majority_gold(m), fingerprint_file(base_path.string())));
  json sources = json::array({base_path.filename().string()});

  std::vector<std::pair<int, fs::path>> ordered;
  for (const auto& r : revisions) ordered.emplace_back(round_from_filename(r), r);
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [round, path] : ordered) {
    const auto rev = read_sheet(path);
    check_labels(rev, path);
    m = merge_adjudication(m, rev);
    rounds.push_back(summarize_round(m, majority_gold(m), fingerprint_file(path.string())));
    sources.push_back(path.filename().string());
  }
  const auto gold = majority_gold(m);

  WeakDataset gold_set;
  gold_set.kind = "gold";
  gold_set.config = json{{"sheets", sources}, {"round", m.round}, {"annotators", m.annotators}};
  for (const auto& s : rounds) gold_set.config["sheet_fingerprints"].push_back(s.sheet_fingerprint);
  std::unordered_map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < gold.size(); ++i) at.emplace(gold[i].id, i);
  for (const auto& e : eval.examples) {
    const auto& g = gold[at.at(e.id)];
    Example x{e.id, e.text, std::nullopt, Provenance::Gold, std::string(to_string(g.resolution))};
    if (g.label) x.label = parse_label(*g.label);
    gold_set.examples.push_back(std::move(x));
  }

  json prov = cfg.provenance(command);
  prov["eval_fingerprint"] = eval.fingerprint();
  prov["sheets"] = sources;

  Outputs outs(cfg, command);
  // Sheets from an earlier run may name rounds this run does not produce.
  const auto out_dir = cfg.resolve(cfg.output_dir);
  auto is_input = [&](const fs::path& p) {
    if (fs::equivalent(p, base_path)) return true;
    return std::any_of(revisions.begin(), revisions.end(), [&](const fs::path& r) { return fs::equivalent(p, r); });
  };
  if (fs::exists(out_dir))
    for (const auto& f : fs::directory_iterator(out_dir)) {
      const auto name = f.path().filename().string();
      if (is_input(f.path())) continue;
      if ((name.rfind(artifact::kAdjudicationStem, 0) == 0 || name.rfind(artifact::kMergedSheetStem, 0) == 0) &&
          f.path().extension() == ".tsv")
        outs.remove(name);
    }
  {
    auto out = open_output(outs.path(artifact::kKappaTsv));
    write_tsv_provenance(out, prov);
    out << "round\titems\tannotators\tkappa\tunanimous\tmajority\tunresolved\tsupportive\tnot_supportive\n";
    for (const auto& s : rounds)
      out << s.round << '\t' << s.items << '\t' << m.annotators << '\t' << fixed(s.kappa, 4) << '\t' << s.unanimous
          << '\t' << s.majority << '\t' << s.unresolved << '\t' << s.supportive << '\t' << s.not_supportive << '\n';
  }
  {
    auto out = open_output(outs.path(artifact::kKappaJsonl));
    write_json_line(out, json{{"provenance", prov}});
    for (const auto& s : rounds)
      write_json_line(out, json{{"round", s.round},
                                {"sheet_fingerprint", s.sheet_fingerprint},
                                {"items", s.items},
                                {"kappa", s.kappa},
                                {"unanimous", s.unanimous},
                                {"majority", s.majority},
                                {"unresolved", s.unresolved},
                                {"supportive", s.supportive},
                                {"not_supportive", s.not_supportive}});
  }
  write_dataset(outs.path(artifact::kGold), gold_set, prov);
  if (!revisions.empty()) {
    const auto rel = sheet_path("", artifact::kMergedSheetStem, m.round).string();
    write_sheet(outs.path(rel), m, prov);
  }
  const auto next = adjudication_sheet(m, gold);
  if (next.items() > 0) {
    const auto rel = sheet_path("", artifact::kAdjudicationStem, next.round).string();
    write_sheet(outs.path(rel), next, prov);
    log << command << ": " << next.items() << " tied items exported to " << rel << '\n';
  }
  outs.commit();
  for (const auto& s : rounds)
    log << command << " round " << s.round << ": kappa " << fixed(s.kappa, 4) << ", " << s.supportive
        << " supportive / " << s.not_supportive << " not-supportive, " << s.unresolved << " unresolved\n";
}

}  // namespace command_detail

inline void cmd_kappa(const PipelineConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  command_detail::agreement(cfg, opt, {}, "kappa", log);
}

inline void cmd_adjudicate(const PipelineConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  std::vector<fs::path> revisions;
  for (const auto& r : opt.revisions) revisions.push_back(fs::absolute(r));
  if (revisions.empty())
    for (const auto& r : cfg.adjudication_sheets) revisions.push_back(cfg.resolve(r));
  if (revisions.empty()) throw ConfigError("no revision sheets: pass --revision or set eval.adjudication_sheets");
  command_detail::agreement(cfg, opt, revisions, "adjudicate", log);
}

inline void cmd_experiment(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  using namespace command_detail;
  const auto informed = load_dataset(cfg, artifact::kInformed, "build-informed");
  const auto hashtag = load_dataset(cfg, artifact::kHashtag, "build-hashtag-baseline");
  const auto gold = load_dataset(cfg, artifact::kGold, "kappa");
  const auto ingested = load_ingested(cfg);

  std::vector<std::pair<std::string, WeakDataset>> sets;
  std::size_t leaked = 0;
  if (cfg.supervised) {
    WeakDataset sup = read_dataset(cfg.resolve(*cfg.supervised));
    const IdSet eval_ids = gold.ids();
    std::vector<Example> kept;
    for (auto& e : sup.examples) {
      if (cfg.exclude_eval && eval_ids.contains(e.id)) {
        ++leaked;
        continue;
      }
      e.text = clean(e.text.text);
      kept.push_back(std::move(e));
    }
    sup.examples = std::move(kept);
    sup.kind = "supervised";
    sets.emplace_back("supervised", std::move(sup));
  }
  sets.emplace_back("informed", informed);
  sets.emplace_back("hashtag", hashtag);

  ExperimentOptions opt;
  opt.runs = cfg.runs;
  opt.base_seed = cfg.seed;
  opt.validation_fraction = cfg.split_validation;
  opt.min_df = cfg.min_df;
  opt.train = cfg.train;
  opt.jobs = cfg.jobs;

  json prov = cfg.provenance("experiment");
  prov["corpus_fingerprint"] = ingested.corpus_fingerprint;
  prov["base_seed"] = cfg.seed;
  prov["runs"] = cfg.runs;
  prov["split"] = {{"train", cfg.split_train}, {"validation", cfg.split_validation}};
  prov["eval_fingerprint"] = gold.fingerprint();
  prov["supervised_dropped_eval_overlap"] = leaked;

  Outputs outs(cfg, "experiment");
  std::vector<EvalReport> reports;
  for (const auto kind : cfg.kinds) {
    opt.kind = kind;
    for (const auto& [name, ds] : sets) {
      reports.push_back(run_experiment(name, ds, gold, opt));
      auto& best = reports.back().best_model;
      json mp = prov;
      mp["model"] = name;
      mp["kind"] = to_string(kind);
      mp["seed"] = reports.back().runs[reports.back().best_run].seed;
      mp["train_fingerprint"] = ds.fingerprint();
      best.provenance = mp.dump();
      save_scorer_model(outs.path(std::string(artifact::kModelDir) + "/" + name + "." + std::string(to_string(kind)) + ".model"),
                        best);
      log << "experiment " << name << "/" << to_string(kind) << ": F1 " << percent(reports.back().f1.mean) << " +/- "
          << percent(reports.back().f1.std) << '\n';
    }
  }
  write_eval_reports(outs.path(artifact::kReportTsv), outs.path(artifact::kReportJsonl), reports, prov);

  // Pakistan-origin predictions from the best run of the first training set
  // (the supervised one when configured).
  const auto& chosen = reports.front();
  json pprov = prov;
  pprov["model"] = chosen.model;
  pprov["kind"] = to_string(chosen.kind);
  pprov["run_seed"] = chosen.runs[chosen.best_run].seed;
  {
    auto out = open_output(outs.path(artifact::kPredictions));
    write_json_line(out, json{{"provenance", pprov}});
    for (const auto& t : ingested.tweets) {
      if (!t.passes || bucket_of(t.country.value) != CountryBucket::Pakistan) continue;
      const double p = chosen.best_model.probability(t.text);
      write_json_line(out, json{{"id", t.id}, {"p", p}, {"label", to_string(p >= 0.5 ? Label::Supportive : Label::NotSupportive)}});
    }
  }
  outs.commit();
}

inline void cmd_engagement(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  using namespace command_detail;
  const auto ingested = load_ingested(cfg);
  const auto groups = load_groups(cfg.resolve(cfg.groups));
  const auto named = named_groups(groups, group_members(ingested.tweets, groups));

  std::vector<EngagementInput> inputs;
  inputs.reserve(ingested.tweets.size());
  for (const auto& t : ingested.tweets) inputs.push_back({t.id, t.likes, t.retweets, bucket_of(t.country.value)});

  json prov = cfg.provenance("engagement");
  prov["corpus_fingerprint"] = ingested.corpus_fingerprint;
  prov["ingest_fingerprint"] = ingested.file_fingerprint;
  prov["records"] = ingested.tweets.size();

  Outputs outs(cfg, "engagement");
  write_engagement(outs, artifact::kEngagementTsv, artifact::kEngagementJsonl,
                   engagement_stats(inputs, named, ShareBasis::Group), prov);

  const auto counts = hashtag_counts(ingested.tweets, groups, ingested.buckets());
  {
    auto out = open_output(outs.path(artifact::kHashtagCountsTsv));
    write_tsv_provenance(out, prov);
    out << "# All: column sums (a tweet carrying two variants counts in both rows)\n";
    out << "hashtag\ttotal\tindia\tpakistan\n";
    for (const auto& r : counts) out << r.variant << '\t' << r.total << '\t' << r.india << '\t' << r.pakistan << '\n';
  }
  {
    auto out = open_output(outs.path(artifact::kHashtagCountsJsonl));
    write_json_line(out, json{{"provenance", prov}});
    for (const auto& r : counts)
      write_json_line(out, json{{"hashtag", r.variant}, {"total", r.total}, {"india", r.india}, {"pakistan", r.pakistan}});
  }

  const auto table = jaccard_table(named);
  {
    auto out = open_output(outs.path(artifact::kJaccardTsv));
    write_tsv_provenance(out, prov);
    out << "group";
    for (const auto& g : named) out << '\t' << g.name;
    out << '\n';
    for (std::size_t i = 0; i < named.size(); ++i) {
      out << named[i].name;
      for (std::size_t j = 0; j < named.size(); ++j) out << '\t' << (table[i][j] ? fixed(table[i][j]->value(), 4) : "");
      out << '\n';
    }
  }
  {
    auto out = open_output(outs.path(artifact::kJaccardJsonl));
    write_json_line(out, json{{"provenance", prov}});
    for (std::size_t i = 0; i < named.size(); ++i)
      for (std::size_t j = i + 1; j < named.size(); ++j) {
        json row{{"a", named[i].name}, {"b", named[j].name}};
        if (table[i][j]) {
          row["intersection"] = table[i][j]->num;
          row["union"] = table[i][j]->den;
          row["jaccard"] = table[i][j]->value();
        } else {
          row["jaccard"] = nullptr;
        }
        write_json_line(out, row);
      }
  }

  // Label x country view, when the experiment has produced predictions.
  const auto pred_path = cfg.out(artifact::kPredictions);
  if (fs::exists(pred_path)) {
    std::vector<NamedGroup> labels{{std::string(to_string(Label::Supportive)), {}},
                                   {std::string(to_string(Label::NotSupportive)), {}}};
    read_jsonl(pred_path, [&](const json& j, std::size_t) {
      const auto l = parse_label(j.at("label").get<std::string>());
      labels[l == Label::Supportive ? 0 : 1].ids.insert(j.at("id").get<std::string>());
    });
    json pprov = prov;
    pprov["predictions_fingerprint"] = fingerprint_file(pred_path.string());
    std::vector<EngagementRow> rows;
    for (auto& r : engagement_stats(inputs, labels, ShareBasis::Bucket))
      if (r.bucket == CountryBucket::Pakistan) rows.push_back(std::move(r));
    write_engagement(outs, artifact::kPredictedEngagementTsv, artifact::kPredictedEngagementJsonl, rows, pprov);
  } else {
    outs.remove(artifact::kPredictedEngagementTsv);
    outs.remove(artifact::kPredictedEngagementJsonl);
  }
  outs.commit();
  log << "engagement: " << named.size() << " groups over " << inputs.size() << " tweets\n";
}

inline void cmd_termfreq(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  const auto ingested = load_ingested(cfg);
  const auto groups = load_groups(cfg.resolve(cfg.groups));
  const auto members = group_members(ingested.tweets, groups);
  json prov = cfg.provenance("termfreq");
  prov["corpus_fingerprint"] = ingested.corpus_fingerprint;
  prov["top_n"] = cfg.top_n;

  Outputs outs(cfg, "termfreq");
  auto tsv = open_output(outs.path(artifact::kTermfreqTsv));
  auto jsonl = open_output(outs.path(artifact::kTermfreqJsonl));
  write_tsv_provenance(tsv, prov);
  tsv << "group\trank\tterm\tcount\n";
  write_json_line(jsonl, json{{"provenance", prov}});
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<CleanText> docs;
    for (const auto& t : ingested.tweets)
      if (members[g].contains(t.id)) docs.push_back(t.text);
    const auto terms = term_frequencies(docs, cfg.top_n);
    json list = json::array();
    for (std::size_t r = 0; r < terms.size(); ++r) {
      tsv << groups[g].group_id << '\t' << (r + 1) << '\t' << terms[r].first << '\t' << terms[r].second << '\n';
      list.push_back({terms[r].first, terms[r].second});
    }
    write_json_line(jsonl, json{{"group", groups[g].group_id}, {"documents", docs.size()}, {"terms", list}});
  }
  tsv.close();
  jsonl.close();
  outs.commit();
  log << "termfreq: top " << cfg.top_n << " terms for " << groups.size() << " groups\n";
}

/// Re-hashes every file in the manifest and reports modified, missing, or
/// untracked outputs and files written under a different config.
inline std::vector<std::string> verify_outputs(const PipelineConfig& cfg) {
  const auto dir = cfg.resolve(cfg.output_dir);
  if (!fs::exists(dir / artifact::kManifest)) throw MissingArtifactError(artifact::kManifest, "ingest");
  const Manifest m(dir);
  const auto current = cfg.fingerprint();
  std::vector<std::string> problems;
  for (const auto& [rel, e] : m.entries()) {
    const auto path = dir / rel;
    if (!fs::exists(path)) {
      problems.push_back("missing\t" + rel);
      continue;
    }
    if (fingerprint_file(path.string()) != e.fingerprint) problems.push_back("modified\t" + rel);
    const auto embedded = embedded_config_fingerprint(path);
    if (!embedded)
      problems.push_back("no-provenance\t" + rel);
    else if (*embedded != e.config_fingerprint)
      problems.push_back("provenance-mismatch\t" + rel);
    if (e.config_fingerprint != current) problems.push_back("config-drift\t" + rel + "\t" + e.config_fingerprint);
  }
  for (const auto& f : fs::recursive_directory_iterator(dir)) {
    if (!f.is_regular_file()) continue;
    const auto rel = fs::relative(f.path(), dir).generic_string();
    if (rel == artifact::kManifest || rel.rfind("cache/", 0) == 0) continue;
    if (!m.entries().contains(rel)) problems.push_back("untracked\t" + rel);
  }
  return problems;
}

inline void cmd_verify(const PipelineConfig& cfg, const CommandOptions&, std::ostream& log) {
  const auto problems = verify_outputs(cfg);
  for (const auto& p : problems) log << p << '\n';
  if (!problems.empty())
    throw DataError("verify found " + std::to_string(problems.size()) + " problem(s) in the output directory");
  log << "verify: ok (" << Manifest(cfg.resolve(cfg.output_dir)).entries().size() << " files)\n";
}

using CommandFn = void (*)(const PipelineConfig&, const CommandOptions&, std::ostream&);

struct CommandInfo {
  const char* name;
  CommandFn run;
  const char* help;
};

inline const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> all{
      {"ingest", cmd_ingest, "clean texts, infer countries, apply the length filter"},
      {"partition", cmd_partition, "split the corpus by hashtag group polarity"},
      {"train-scorer", cmd_train_scorer, "train built-in scorers on their seed datasets"},
      {"score", cmd_score, "score labeled-side tweets with every configured scorer"},
      {"sample-eval", cmd_sample_eval, "draw the evaluation sample and its annotation sheet"},
      {"build-informed", cmd_build_informed, "build the informed-sampling training set"},
      {"build-hashtag-baseline", cmd_build_hashtag_baseline, "build the hashtag-only training set"},
      {"pair-rate", cmd_pair_rate, "pairwise discriminability rate per scorer"},
      {"kappa", cmd_kappa, "Fleiss' kappa and majority gold labels for an annotation sheet"},
      {"adjudicate", cmd_adjudicate, "merge adjudication rounds and recompute agreement"},
      {"experiment", cmd_experiment, "train and evaluate linear models on each training set"},
      {"engagement", cmd_engagement, "hashtag counts, engagement by country, Jaccard overlap"},
      {"termfreq", cmd_termfreq, "term frequencies per hashtag group"},
      {"verify", cmd_verify, "re-hash outputs against the manifest"},
  };
  return all;
}

inline const CommandInfo* find_command(std::string_view name) {
  for (const auto& c : commands())
    if (name == c.name) return &c;
  return nullptr;
}

}  // namespace supportive::pipeline
