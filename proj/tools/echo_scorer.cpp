// Stub external scorer speaking wire protocol v1. Used to exercise the
// external-scorer path without any neural component; the failure modes
// reproduce what a misbehaving scorer process can do.

#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using json = nlohmann::json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Unbuffered line reader over stdin, so "no input for a while" is observable.
class LineReader {
 public:
  enum class Status { Line, Idle, Eof };

  Status next(std::string& line, int idle_ms) {
    while (true) {
      if (const auto nl = buf_.find('\n'); nl != std::string::npos) {
        line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return Status::Line;
      }
      if (eof_) {
        if (buf_.empty()) return Status::Eof;
        line = std::move(buf_);
        buf_.clear();
        return Status::Line;
      }
      if (idle_ms >= 0) {
        pollfd fd{STDIN_FILENO, POLLIN, 0};
        if (::poll(&fd, 1, idle_ms) == 0) return Status::Idle;
      }
      char chunk[4096];
      const auto n = ::read(STDIN_FILENO, chunk, sizeof chunk);
      if (n <= 0)
        eof_ = true;
      else
        buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  std::string buf_;
  bool eof_ = false;
};

void emit(const json& j) { std::cout << j.dump() << '\n' << std::flush; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echo scorer (wire protocol v1)"};
  double p = 0.9;
  std::string name = "echo";
  std::string mode = "ok";
  std::size_t after = 0;
  int sleep_ms = 0;
  int protocol = 1;
  bool hash = false;
  std::vector<std::string> keywords;
  app.add_option("--p", p, "probability returned for every request");
  app.add_option("--name", name, "name announced in the handshake");
  app.add_option("--mode", mode, "ok | crash | bad-p | error | sleep | shuffle | drop | duplicate")
      ->check(CLI::IsMember({"ok", "crash", "bad-p", "error", "sleep", "shuffle", "drop", "duplicate"}));
  app.add_option("--after", after, "requests answered normally before the failure mode starts");
  app.add_option("--sleep-ms", sleep_ms, "delay per response in sleep mode");
  app.add_option("--protocol", protocol, "protocol version announced in the handshake");
  app.add_flag("--hash", hash, "derive p from a hash of the text instead of --p");
  app.add_option("--keywords", keywords, "p = 0.9 when the text contains one of these words, else 0.1")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::set<std::string> words(keywords.begin(), keywords.end());
  auto probability = [&](const std::string& text) {
    if (!words.empty()) {
      std::istringstream in(text);
      std::string w;
      while (in >> w)
        if (words.contains(w)) return 0.9;
      return 0.1;
    }
    if (hash) return static_cast<double>(fnv1a(text) % 1001) / 1000.0;
    return p;
  };

  std::vector<json> held;  // shuffle mode: answered in reverse once input pauses
  auto flush_held = [&] {
    std::reverse(held.begin(), held.end());
    for (const auto& j : held) emit(j);
    held.clear();
  };

  LineReader reader;
  std::string line;
  std::size_t line_no = 0;
  std::size_t served = 0;
  while (true) {
    const auto status = reader.next(line, held.empty() ? -1 : 20);
    if (status == LineReader::Status::Idle) {
      flush_held();
      continue;
    }
    if (status == LineReader::Status::Eof) break;
    ++line_no;
    json req = json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.is_object()) {
      emit({{"error", "malformed request"}, {"line", line_no}});
      continue;
    }
    if (req.value("op", std::string{}) == "hello") {
      emit({{"protocol", protocol}, {"name", name}});
      continue;
    }
    if (!req.contains("id") || !req["id"].is_string() || !req.contains("text") || !req["text"].is_string()) {
      emit({{"error", "request needs string id and text"}, {"line", line_no}});
      continue;
    }
    const auto id = req["id"].get<std::string>();
    const bool failing = served++ >= after;
    json resp{{"id", id}, {"p", probability(req["text"].get<std::string>())}};
    if (failing) {
      if (mode == "crash") return 3;
      if (mode == "bad-p") resp["p"] = 1.5;
      if (mode == "error") resp = {{"id", id}, {"error", "refused"}};
      if (mode == "drop") continue;
      if (mode == "sleep") std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
      if (mode == "duplicate") emit(resp);
      if (mode == "shuffle") {
        held.push_back(resp);
        continue;
      }
    }
    emit(resp);
  }
  flush_held();
  return 0;
}
