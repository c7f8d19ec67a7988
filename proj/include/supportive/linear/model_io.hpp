#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "supportive/error.hpp"
#include "supportive/linear/model.hpp"
#include "supportive/linear/vocabulary.hpp"
#include "supportive/util/hash.hpp"

namespace supportive {

/// A fitted vocabulary together with the model trained on its vectors.
struct ScorerModel {
  Vocabulary vocabulary;
  LinearModel model;
  std::string provenance;  // single-line JSON; not part of the model's identity

  double probability(const CleanText& text) const { return predict_proba(model, vectorize(text, vocabulary)); }
};

inline constexpr std::string_view kModelFormatTag = "supportive-linear-model";
inline constexpr int kModelFormatVersion = 1;

namespace model_io_detail {

// Hex float text round-trips every double exactly.
inline std::string hex_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::hex);
  if (ec != std::errc{}) throw DataError("cannot format number");
  return std::string(buf, end);
}

inline double parse_hex_double(std::string_view s) {
  double x = 0.0;
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x, std::chars_format::hex);
  if (ec != std::errc{} || end != s.data() + s.size()) throw DataError("bad number '" + std::string(s) + "' in model file");
  return negative ? -x : x;
}

inline std::string expect_key(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("model file truncated before '" + std::string(key) + "'");
  const auto space = line.find(' ');
  if (space == std::string::npos || std::string_view(line).substr(0, space) != key)
    throw DataError("model file: expected '" + std::string(key) + "', found '" + line + "'");
  return line.substr(space + 1);
}

inline std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw DataError("bad integer '" + s + "' in model file");
  return v;
}

}  // namespace model_io_detail

/// Plain-text model format, version 1:
///
///   supportive-linear-model v1
///   provenance <single-line JSON>
///   kind <logistic|hinge>
///   seed <n>
///   epochs <n>
///   learning_rate <hexfloat>
///   l2 <hexfloat>
///   bias <hexfloat>
///   n_documents <n>
///   terms <V>
///   <term>\t<df>\t<weight hexfloat>      (V lines, lexicographic order)
inline void write_scorer_model(std::ostream& out, const ScorerModel& sm) {
  using namespace model_io_detail;
  const auto& m = sm.model;
  const auto& v = sm.vocabulary;
  if (m.weights.size() != v.size()) throw DimensionMismatchError("model and vocabulary sizes differ");
  if (sm.provenance.find('\n') != std::string::npos) throw DataError("model provenance must be a single line");
  out << kModelFormatTag << " v" << kModelFormatVersion << '\n';
  out << "provenance " << (sm.provenance.empty() ? "{}" : sm.provenance) << '\n';
  out << "kind " << to_string(m.kind) << '\n';
  out << "seed " << m.training_seed << '\n';
  out << "epochs " << m.config.epochs << '\n';
  out << "learning_rate " << hex_double(m.config.learning_rate) << '\n';
  out << "l2 " << hex_double(m.config.l2) << '\n';
  out << "bias " << hex_double(m.bias) << '\n';
  out << "n_documents " << v.n_documents() << '\n';
  out << "terms " << v.size() << '\n';
  for (std::size_t i = 0; i < v.size(); ++i)
    out << v.term(i) << '\t' << v.document_frequency(i) << '\t' << hex_double(m.weights[i]) << '\n';
}

inline ScorerModel read_scorer_model(std::istream& in) {
  using namespace model_io_detail;
  std::string header;
  std::getline(in, header);
  const std::string expected = std::string(kModelFormatTag) + " v" + std::to_string(kModelFormatVersion);
  if (header.rfind(std::string(kModelFormatTag) + " ", 0) != 0) throw DataError("not a model file");
  if (header != expected) throw DataError("unsupported model format '" + header + "', expected '" + expected + "'");

  ScorerModel sm;
  sm.provenance = expect_key(in, "provenance");
  auto kind = parse_loss_kind(expect_key(in, "kind"));
  if (!kind) throw DataError("model file: unknown kind");
  sm.model.kind = *kind;
  sm.model.training_seed = parse_uint(expect_key(in, "seed"));
  sm.model.config.epochs = parse_uint(expect_key(in, "epochs"));
  sm.model.config.learning_rate = parse_hex_double(expect_key(in, "learning_rate"));
  sm.model.config.l2 = parse_hex_double(expect_key(in, "l2"));
  sm.model.bias = parse_hex_double(expect_key(in, "bias"));
  const auto n_documents = parse_uint(expect_key(in, "n_documents"));
  const auto n_terms = parse_uint(expect_key(in, "terms"));

  std::vector<std::string> terms;
  std::vector<std::uint32_t> df;
  terms.reserve(n_terms);
  df.reserve(n_terms);
  sm.model.weights.reserve(n_terms);
  std::string line;
  for (std::uint64_t i = 0; i < n_terms; ++i) {
    if (!std::getline(in, line)) throw DataError("model file truncated in term table");
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) throw DataError("malformed term line in model file");
    terms.push_back(line.substr(0, t1));
    df.push_back(static_cast<std::uint32_t>(parse_uint(line.substr(t1 + 1, t2 - t1 - 1))));
    sm.model.weights.push_back(parse_hex_double(line.substr(t2 + 1)));
  }
  sm.vocabulary = Vocabulary(std::move(terms), std::move(df), n_documents);
  return sm;
}

inline void save_scorer_model(const std::filesystem::path& path, const ScorerModel& sm) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model '" + path.string() + "'");
  write_scorer_model(out, sm);
}

inline ScorerModel load_scorer_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model '" + path.string() + "'");
  return read_scorer_model(in);
}

/// Content fingerprint, used as the scorer version for score caching.
inline std::string model_fingerprint(ScorerModel sm) {
  sm.provenance.clear();
  std::ostringstream out;
  write_scorer_model(out, sm);
  return fingerprint_of(out.str());
}

}  // namespace supportive
