#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "supportive/corpus/partition.hpp"
#include "supportive/corpus/text.hpp"
#include "supportive/error.hpp"
#include "supportive/util/hash.hpp"
#include "supportive/util/jsonl.hpp"

namespace supportive {

enum class Label { Supportive, NotSupportive };

inline std::string_view to_string(Label l) noexcept { return l == Label::Supportive ? "supportive" : "not-supportive"; }

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "supportive" || s == "1" || s == "pos") return Label::Supportive;
  if (s == "not-supportive" || s == "0" || s == "neg") return Label::NotSupportive;
  return std::nullopt;
}

/// Where an example's label came from.
enum class Provenance { InformedPositive, InformedNegative, HashtagPositive, HashtagNegative, Gold };

inline std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::InformedPositive:
      return "informed+";
    case Provenance::InformedNegative:
      return "informed-";
    case Provenance::HashtagPositive:
      return "hashtag+";
    case Provenance::HashtagNegative:
      return "hashtag-";
    case Provenance::Gold:
      break;
  }
  return "gold";
}

inline std::optional<Provenance> parse_provenance(std::string_view s) {
  for (auto p : {Provenance::InformedPositive, Provenance::InformedNegative, Provenance::HashtagPositive,
                 Provenance::HashtagNegative, Provenance::Gold})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

struct Example {
  std::string id;
  CleanText text;
  std::optional<Label> label;  // empty for gold rows awaiting annotation
  Provenance provenance = Provenance::Gold;
  std::string origin;  // informed rows: the ranked list(s) the tweet came from
};

/// Labeled (or to-be-labeled) examples plus the configuration that built them.
struct WeakDataset {
  std::string kind;  // "informed", "hashtag", "eval", "supervised", ...
  json config = json::object();
  std::vector<Example> examples;

  std::string config_fingerprint() const { return fingerprint_of(config.dump()); }

  std::size_t count(Label l) const {
    std::size_t n = 0;
    for (const auto& e : examples) n += e.label == l;
    return n;
  }

  std::vector<std::string> unlabeled_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : examples)
      if (!e.label) ids.push_back(e.id);
    return ids;
  }

  IdSet ids() const {
    IdSet out;
    for (const auto& e : examples) out.insert(e.id);
    return out;
  }

  /// Content fingerprint: kind, config, and every example in order.
  std::string fingerprint() const {
    Fingerprint fp;
    fp.field(kind).field(config.dump());
    for (const auto& e : examples)
      fp.field(e.id).field(e.text.text).field(e.label ? to_string(*e.label) : "").field(to_string(e.provenance));
    return fp.hex();
  }
};

/// Cleaned text by tweet id.
using TextIndex = std::unordered_map<std::string, CleanText>;

inline const CleanText& text_of(const TextIndex& texts, const std::string& id) {
  auto it = texts.find(id);
  if (it == texts.end()) throw DataError("no text for tweet '" + id + "'");
  return it->second;
}

/// Header {"provenance": {kind, config, config_fingerprint, build_fingerprint,
/// ...extra}}, then one {"id","text","label","provenance","origin",
/// "config_fingerprint"} per example. A config_fingerprint already in `extra`
/// (the pipeline's) wins over the builder's own.
inline void write_dataset(const std::filesystem::path& path, const WeakDataset& ds, json extra = json::object()) {
  auto out = open_output(path);
  const auto build_fp = ds.config_fingerprint();
  const auto cfp = extra.contains("config_fingerprint") ? extra["config_fingerprint"].get<std::string>() : build_fp;
  extra["kind"] = ds.kind;
  extra["config"] = ds.config;
  extra["config_fingerprint"] = cfp;
  extra["build_fingerprint"] = build_fp;
  extra["n_examples"] = ds.examples.size();
  write_json_line(out, json{{"provenance", extra}});
  for (const auto& e : ds.examples) {
    json j{{"id", e.id},
           {"text", e.text.text},
           {"label", e.label ? json(to_string(*e.label)) : json(nullptr)},
           {"provenance", to_string(e.provenance)}};
    if (!e.origin.empty()) j["origin"] = e.origin;
    j["config_fingerprint"] = cfp;
    write_json_line(out, j);
  }
}

inline WeakDataset read_dataset(const std::filesystem::path& path) {
  WeakDataset ds;
  read_jsonl(
      path,
      [&](const json& j, std::size_t line) {
        try {
          Example e;
          e.id = j.at("id").get<std::string>();
          // Stored text is already normalized; re-cleaning is a no-op.
          e.text = CleanText::from_normalized(j.at("text").get<std::string>());
          if (j.contains("label") && !j["label"].is_null()) {
            auto l = j["label"].is_string() ? parse_label(j["label"].get<std::string>())
                     : j["label"].is_number_integer() ? parse_label(std::to_string(j["label"].get<int>()))
                                                      : std::nullopt;
            if (!l) throw DataError("unknown label " + j["label"].dump());
            e.label = l;
          }
          auto p = parse_provenance(j.value("provenance", std::string("gold")));
          if (!p) throw DataError("unknown provenance " + j["provenance"].dump());
          e.provenance = *p;
          e.origin = j.value("origin", std::string{});
          ds.examples.push_back(std::move(e));
        } catch (const DataError& e) {
          throw DataError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        } catch (const json::exception& e) {
          throw DataError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
      },
      [&](const json& prov) {
        ds.kind = prov.value("kind", std::string{});
        if (prov.contains("config")) ds.config = prov["config"];
      });
  return ds;
}

}  // namespace supportive
