#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "supportive/error.hpp"
#include "supportive/util/jsonl.hpp"

namespace supportive {

/// Categorical labels from k annotators over a list of items. A missing
/// label is an empty optional.
struct AnnotationMatrix {
  std::vector<std::string> ids;
  std::vector<std::string> texts;  // parallel to ids; may be empty strings
  std::size_t annotators = 0;
  std::vector<std::vector<std::optional<std::string>>> labels;  // [item][annotator]
  int round = 1;

  std::size_t items() const noexcept { return ids.size(); }

  void add(std::string id, std::string text, std::vector<std::optional<std::string>> row) {
    if (row.size() != annotators)
      throw DataError("item '" + id + "' has " + std::to_string(row.size()) + " label cells; expected " +
                      std::to_string(annotators));
    ids.push_back(std::move(id));
    texts.push_back(std::move(text));
    labels.push_back(std::move(row));
  }

  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
  }

  /// Label counts for one item, by category.
  std::map<std::string, std::size_t> counts(std::size_t item) const {
    std::map<std::string, std::size_t> c;
    for (const auto& l : labels.at(item))
      if (l) ++c[*l];
    return c;
  }

  void validate() const {
    if (annotators < 2) throw DataError("annotation matrix needs at least 2 annotators");
    if (ids.empty()) throw DataError("annotation matrix has no items");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!seen.insert(ids[i]).second) throw DataError("duplicate item id '" + ids[i] + "' in annotation matrix");
      if (labels[i].size() != annotators) throw DataError("ragged row for item '" + ids[i] + "'");
    }
  }
};

/// Fleiss' kappa with per-item rater counts. Every item needs at least two
/// labels. When all labels fall in one category the chance term is 1 and
/// kappa is reported as 1.
inline double fleiss_kappa(const AnnotationMatrix& m) {
  m.validate();
  std::map<std::string, double> category_totals;
  double total_labels = 0.0;
  double p_bar = 0.0;
  for (std::size_t i = 0; i < m.items(); ++i) {
    const auto c = m.counts(i);
    std::size_t n = 0;
    for (const auto& [cat, k] : c) n += k;
    if (n < 2) throw DataError("item '" + m.ids[i] + "' has " + std::to_string(n) + " labels; kappa needs at least 2");
    double agree = 0.0;
    for (const auto& [cat, k] : c) {
      agree += static_cast<double>(k) * static_cast<double>(k - 1);
      category_totals[cat] += static_cast<double>(k);
    }
    p_bar += agree / (static_cast<double>(n) * static_cast<double>(n - 1));
    total_labels += static_cast<double>(n);
  }
  p_bar /= static_cast<double>(m.items());
  double p_e = 0.0;
  for (const auto& [cat, k] : category_totals) p_e += (k / total_labels) * (k / total_labels);
  if (p_e >= 1.0) return 1.0;  // one category only, so P̄ is 1 as well
  return (p_bar - p_e) / (1.0 - p_e);
}

enum class Resolution { Unanimous, Majority, Unresolved };

inline std::string_view to_string(Resolution r) noexcept {
  switch (r) {
    case Resolution::Unanimous:
      return "unanimous";
    case Resolution::Majority:
      return "majority";
    case Resolution::Unresolved:
      break;
  }
  return "unresolved";
}

struct GoldLabel {
  std::string id;
  std::optional<std::string> label;  // empty when unresolved
  Resolution resolution = Resolution::Unresolved;
};

/// Unanimous items keep their label; a strict plurality wins otherwise; a tie
/// at the top leaves the item unresolved for adjudication.
inline std::vector<GoldLabel> majority_gold(const AnnotationMatrix& m) {
  m.validate();
  std::vector<GoldLabel> out;
  out.reserve(m.items());
  for (std::size_t i = 0; i < m.items(); ++i) {
    const auto c = m.counts(i);
    GoldLabel g{m.ids[i], std::nullopt, Resolution::Unresolved};
    if (c.size() == 1) {
      g.label = c.begin()->first;
      g.resolution = Resolution::Unanimous;
    } else if (!c.empty()) {
      std::size_t best = 0;
      std::size_t ties = 0;
      const std::string* winner = nullptr;
      for (const auto& [cat, k] : c) {
        if (k > best) {
          best = k;
          ties = 1;
          winner = &cat;
        } else if (k == best) {
          ++ties;
        }
      }
      if (ties == 1) {
        g.label = *winner;
        g.resolution = Resolution::Majority;
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// Applies a later round's revisions: non-empty revision cells overwrite,
/// empty cells keep the base label.
inline AnnotationMatrix merge_adjudication(const AnnotationMatrix& base, const AnnotationMatrix& revisions) {
  if (revisions.round != base.round + 1)
    throw DataError("revision round " + std::to_string(revisions.round) + " does not follow base round " +
                    std::to_string(base.round));
  if (!revisions.ids.empty() && revisions.annotators != base.annotators)
    throw DataError("revision sheet has " + std::to_string(revisions.annotators) + " annotators; base has " +
                    std::to_string(base.annotators));
  AnnotationMatrix merged = base;
  merged.round = revisions.round;
  for (std::size_t r = 0; r < revisions.items(); ++r) {
    auto i = base.index_of(revisions.ids[r]);
    if (!i) throw DataError("revision names unknown item '" + revisions.ids[r] + "'");
    for (std::size_t a = 0; a < base.annotators; ++a)
      if (revisions.labels[r][a]) merged.labels[*i][a] = revisions.labels[r][a];
  }
  return merged;
}

/// Next-round sheet holding the unresolved items, with their current labels
/// filled in for the annotators to revise.
inline AnnotationMatrix adjudication_sheet(const AnnotationMatrix& m, const std::vector<GoldLabel>& gold) {
  AnnotationMatrix next;
  next.annotators = m.annotators;
  next.round = m.round + 1;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i].resolution == Resolution::Unresolved) next.add(m.ids.at(i), m.texts.at(i), m.labels.at(i));
  return next;
}

// ---------------------------------------------------------------------------
// Sheets: tab-separated, header "id\ttext\tannotator_1..k", empty cell for a
// missing label. The round comes from a ".r<N>.tsv" filename suffix. Lines
// starting with '#' are comments (the pipeline writes its provenance there).

inline std::filesystem::path sheet_path(const std::filesystem::path& dir, const std::string& stem, int round) {
  return dir / (stem + ".r" + std::to_string(round) + ".tsv");
}

inline int round_from_filename(const std::filesystem::path& path) {
  static const std::regex re(R"(\.r([0-9]+)\.tsv$)");
  std::smatch m;
  const std::string name = path.filename().string();
  if (!std::regex_search(name, m, re)) throw ConfigError("sheet name '" + name + "' lacks a .r<N>.tsv round suffix");
  return std::stoi(m[1].str());
}

namespace sheet_detail {

inline std::string cell(std::string s) {
  for (char& ch : s)
    if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace sheet_detail

inline void write_sheet(const std::filesystem::path& path, const AnnotationMatrix& m,
                        const json& provenance = nullptr) {
  using sheet_detail::cell;
  auto out = open_output(path);
  if (!provenance.is_null()) out << "# provenance " << provenance.dump() << '\n';
  out << "id\ttext";
  for (std::size_t a = 0; a < m.annotators; ++a) out << "\tannotator_" << (a + 1);
  out << '\n';
  for (std::size_t i = 0; i < m.items(); ++i) {
    out << cell(m.ids[i]) << '\t' << cell(m.texts[i]);
    for (const auto& l : m.labels[i]) out << '\t' << (l ? cell(*l) : std::string{});
    out << '\n';
  }
}

inline AnnotationMatrix read_sheet(const std::filesystem::path& path) {
  auto in = open_input(path);
  AnnotationMatrix m;
  m.round = round_from_filename(path);
  std::string line;
  std::size_t line_no = 0;
  do {
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty sheet");
    ++line_no;
  } while (!line.empty() && line.front() == '#');
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = sheet_detail::split_tabs(line);
  if (header.size() < 2 || header[0] != "id" || header[1] != "text")
    throw DataError(path.string() + ": header must start with id<TAB>text");
  m.annotators = header.size() - 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = sheet_detail::split_tabs(line);
    if (cells.size() != header.size())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " columns, found " + std::to_string(cells.size()));
    std::vector<std::optional<std::string>> row;
    for (std::size_t c = 2; c < cells.size(); ++c) {
      if (cells[c].empty())
        row.emplace_back();
      else
        row.emplace_back(cells[c]);
    }
    m.add(cells[0], cells[1], std::move(row));
  }
  return m;
}

}  // namespace supportive
