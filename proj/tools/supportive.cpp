// Command-line front end: one subcommand per pipeline stage, all driven by a
// JSON config. Failures print a single JSON line on stderr and exit with the
// error's code.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supportive/pipeline/commands.hpp"

namespace {

using namespace supportive;
using namespace supportive::pipeline;

int report(const std::string& command, const char* kind, int code, const std::string& message, json extra = {}) {
  json j{{"error", kind}, {"exit_code", code}, {"command", command}, {"message", message}};
  if (extra.is_object()) j.update(extra);
  std::cerr << j.dump() << std::endl;
  return code;
}

/// Stages that need no human input, in dependency order. Agreement and the
/// experiment join in once an annotation sheet is configured.
void run_all(const PipelineConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  for (const char* name : {"ingest", "partition", "train-scorer", "score", "sample-eval", "build-informed",
                           "build-hashtag-baseline", "pair-rate"})
    find_command(name)->run(cfg, opt, log);
  const bool annotated = opt.sheet || (cfg.annotation_sheet && fs::exists(cfg.resolve(*cfg.annotation_sheet)));
  if (annotated) {
    if (!opt.revisions.empty() || !cfg.adjudication_sheets.empty())
      cmd_adjudicate(cfg, opt, log);
    else
      cmd_kappa(cfg, opt, log);
    cmd_experiment(cfg, opt, log);
  } else {
    log << "all: no annotation sheet configured; skipping kappa and experiment\n";
  }
  cmd_engagement(cfg, opt, log);
  cmd_termfreq(cfg, opt, log);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-supervision pipeline for supportive-content detection"};
  app.require_subcommand(1, 1);

  fs::path config_path;
  ConfigOverrides ov;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  std::string sheet;
  std::vector<std::string> revisions;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "pipeline config (JSON)")->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("-j,--jobs", jobs, "worker cap");
    sub->add_option("--set", ov.set, "override a config field: key.path=value (repeatable)");
  };

  std::vector<std::pair<CLI::App*, CommandFn>> subs;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    if (std::string_view(c.name) == "kappa" || std::string_view(c.name) == "adjudicate")
      sub->add_option("--sheet", sheet, "annotated round-N sheet (overrides eval.annotation_sheet)");
    if (std::string_view(c.name) == "adjudicate")
      sub->add_option("--revision", revisions, "revision sheet for a later round (repeatable)");
    subs.emplace_back(sub, c.run);
  }
  auto* all = app.add_subcommand("all", "run every stage the available inputs allow");
  add_common(all);
  all->add_option("--sheet", sheet, "annotated round-N sheet");
  all->add_option("--revision", revisions, "revision sheet (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("", "usage", 2, e.what());
  }

  auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    if (chosen->count("--seed")) ov.seed = seed;
    if (chosen->count("--jobs")) ov.jobs = jobs;
    if (!out_dir.empty()) ov.output_dir = out_dir;
    const auto cfg = load_config(config_path, ov);
    CommandOptions opt;
    if (!sheet.empty()) opt.sheet = sheet;
    for (const auto& r : revisions) opt.revisions.emplace_back(r);

    if (chosen == all) {
      run_all(cfg, opt, std::cout);
    } else {
      for (const auto& [sub, run] : subs)
        if (sub == chosen) run(cfg, opt, std::cout);
    }
    return 0;
  } catch (const MissingArtifactError& e) {
    return report(name, e.kind(), e.exit_code(), e.what(), json{{"artifact", e.artifact()}, {"producer", e.producer()}});
  } catch (const Error& e) {
    return report(name, e.kind(), e.exit_code(), e.what());
  } catch (const json::exception& e) {
    return report(name, "data", 4, e.what());
  } catch (const std::exception& e) {
    return report(name, "error", 1, e.what());
  }
}
