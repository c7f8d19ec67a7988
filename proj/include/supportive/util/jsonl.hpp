#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "supportive/error.hpp"

namespace supportive {

using json = nlohmann::json;

// Line-delimited JSON files. An output file may start with a single header
// object {"provenance": {...}}; readers hand it to an optional callback and
// never treat it as a record.

inline bool is_provenance_line(const json& j) {
  return j.is_object() && j.size() == 1 && j.contains("provenance");
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

/// Calls on_record(json, line_number) for every record. Malformed lines go to
/// on_malformed when given, and raise DataError otherwise.
inline void read_jsonl(const std::filesystem::path& path,
                       const std::function<void(const json&, std::size_t)>& on_record,
                       const std::function<void(const json&)>& on_provenance = {},
                       const std::function<void(std::size_t, const std::string&)>& on_malformed = {}) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      if (on_malformed) {
        on_malformed(line_no, "invalid JSON");
        continue;
      }
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    if (is_provenance_line(j)) {
      if (on_provenance) on_provenance(j["provenance"]);
      continue;
    }
    on_record(j, line_no);
  }
}

inline void write_json_line(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

}  // namespace supportive
