// Synthetic inputs with known ground truth: a corpus, hashtag groups, scorer
// seed data, a supervised training set and a ready-to-run config; plus
// simulated annotators for filling in annotation sheets.

#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "supportive/agreement/annotation.hpp"
#include "supportive/corpus/corpus.hpp"
#include "supportive/linear/scorer_training.hpp"
#include "supportive/synth/generator.hpp"

namespace {

using namespace supportive;
namespace fs = std::filesystem;

struct CorpusArgs {
  fs::path out;
  std::size_t tweets = 5000;
  std::uint64_t seed = 1;
  std::size_t top_k = 300;
  std::size_t neg = 150;
  std::size_t eval_n = 500;
  std::size_t supervised_n = 0;  // 0: the size of a full informed build
  std::size_t n_pairs = 100'000;
};

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

void make_corpus(const CorpusArgs& a) {
  synth::SynthConfig sc;
  sc.n_tweets = a.tweets;
  sc.seed = a.seed;
  const auto tweets = synth::generate_corpus(sc);

  std::vector<TweetRecord> records;
  records.reserve(tweets.size());
  {
    auto truth = open_output(a.out / "truth.jsonl");
    for (const auto& t : tweets) {
      records.push_back(t.record);
      write_json_line(truth, json{{"id", t.record.id},
                                  {"positive", t.positive()},
                                  {"subtype", synth::to_string(t.subtype)},
                                  {"side", to_string(t.side)}});
    }
  }
  write_corpus(a.out / "corpus.jsonl", records);
  write_text(a.out / "groups.txt", synth::groups_file_text(synth::default_groups()));

  synth::SeedConfig seeds;
  seeds.seed = a.seed;
  write_seed_dataset(a.out / "hope_seed.jsonl", synth::hope_seed_dataset(seeds));
  write_seed_dataset(a.out / "empathy_seed.jsonl", synth::empathy_seed_dataset(seeds));

  const std::size_t n_sup = a.supervised_n ? a.supervised_n : 2 * (a.top_k + a.neg);
  write_dataset(a.out / "supervised.jsonl", synth::supervised_dataset(sc, n_sup, a.seed));

  const json config{
      {"corpus", "corpus.jsonl"},
      {"groups", "groups.txt"},
      {"output_dir", "out"},
      {"seed", a.seed},
      {"min_tokens", 10},
      {"scorers",
       {{"hope", {{"type", "builtin"}, {"train", "hope_seed.jsonl"}, {"kind", "logistic"}}},
        {"empathy", {{"type", "builtin"}, {"train", "empathy_seed.jsonl"}, {"kind", "logistic"}}}}},
      {"train", {{"epochs", 20}, {"learning_rate", 0.1}, {"l2", 1e-4}}},
      {"eval", {{"n", a.eval_n}, {"annotators", 3}}},
      {"informed", {{"top_k", a.top_k}, {"neg_per_list", a.neg}, {"bottom_frac", 0.8}, {"exclude_eval", true}}},
      {"pair_rate", {{"n_pairs", a.n_pairs}, {"runs", 5}}},
      {"experiment",
       {{"runs", 5}, {"kinds", {"hinge"}}, {"split", {{"train", 0.9}, {"validation", 0.1}}}, {"supervised", "supervised.jsonl"}}},
      {"termfreq", {{"top_n", 50}}}};
  write_text(a.out / "config.json", config.dump(2) + "\n");
  std::cout << "wrote " << tweets.size() << " tweets and " << n_sup << " supervised examples to " << a.out.string() << '\n';
}

int annotate(const fs::path& sheet_in, const fs::path& truth_path, const fs::path& sheet_out,
             const std::vector<double>& error_rates, std::uint64_t seed) {
  std::unordered_map<std::string, bool> truth;
  read_jsonl(truth_path, [&](const json& j, std::size_t) { truth[j.at("id").get<std::string>()] = j.at("positive").get<bool>(); });
  const auto blank = read_sheet(sheet_in);
  const auto filled = synth::simulate_annotations(blank.ids, blank.texts, truth, error_rates, seed, round_from_filename(sheet_out));
  write_sheet(sheet_out, filled);
  std::cout << "annotated " << filled.items() << " items with " << filled.annotators << " annotators\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic fixture generator"};
  app.require_subcommand(1, 1);

  CorpusArgs ca;
  auto* corpus = app.add_subcommand("corpus", "corpus, groups, seed data, supervised set and config");
  corpus->add_option("--out", ca.out, "output directory")->required();
  corpus->add_option("--tweets", ca.tweets, "corpus size");
  corpus->add_option("--seed", ca.seed, "generator and pipeline seed");
  corpus->add_option("--top-k", ca.top_k, "informed.top_k in the written config");
  corpus->add_option("--neg", ca.neg, "informed.neg_per_list in the written config");
  corpus->add_option("--eval-n", ca.eval_n, "eval.n in the written config");
  corpus->add_option("--supervised-n", ca.supervised_n, "supervised set size (default 2*(top_k+neg))");
  corpus->add_option("--pairs", ca.n_pairs, "pair_rate.n_pairs in the written config");

  fs::path sheet_in, truth, sheet_out;
  std::vector<double> rates{0.05, 0.06, 0.08};
  std::uint64_t ann_seed = 1;
  auto* ann = app.add_subcommand("annotate", "fill a sheet with simulated annotators");
  ann->add_option("--sheet", sheet_in, "blank or prefilled sheet")->required()->check(CLI::ExistingFile);
  ann->add_option("--truth", truth, "truth.jsonl from 'corpus'")->required()->check(CLI::ExistingFile);
  ann->add_option("--out", sheet_out, "annotated sheet; its .r<N>.tsv suffix sets the round")->required();
  ann->add_option("--error-rates", rates, "per-annotator label flip rates")->delimiter(',');
  ann->add_option("--seed", ann_seed, "annotator seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*corpus) make_corpus(ca);
    if (*ann) return annotate(sheet_in, truth, sheet_out, rates, ann_seed);
  } catch (const Error& e) {
    std::cerr << json{{"error", e.kind()}, {"exit_code", e.exit_code()}, {"message", e.what()}}.dump() << std::endl;
    return e.exit_code();
  }
  return 0;
}
