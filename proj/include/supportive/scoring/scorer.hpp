#pragma once

#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "supportive/error.hpp"
#include "supportive/linear/model_io.hpp"
#include "supportive/scoring/score_table.hpp"
#include "supportive/util/hash.hpp"
#include "supportive/util/jsonl.hpp"
#include "supportive/util/parallel.hpp"
#include "supportive/util/subprocess.hpp"

namespace supportive {

/// Produces one probability per item, in item order.
class Scorer {
 public:
  virtual ~Scorer() = default;
  /// Identifies the scorer's behaviour for cache keys.
  virtual std::string version() const = 0;
  virtual std::vector<double> score(std::span<const TextItem> items, std::size_t jobs) = 0;
};

/// In-process linear scorer.
class BuiltinScorer final : public Scorer {
 public:
  explicit BuiltinScorer(ScorerModel model) : model_(std::move(model)), version_("builtin:" + model_fingerprint(model_)) {}

  /// Scorer returning p for every input: zero weights, bias logit(p).
  static std::unique_ptr<BuiltinScorer> constant(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("constant scorer probability must lie in (0, 1)");
    ScorerModel m;
    m.vocabulary = Vocabulary({"_"}, {1}, 1);
    m.model.weights = {0.0};
    m.model.bias = std::log(p / (1.0 - p));
    return std::make_unique<BuiltinScorer>(std::move(m));
  }

  std::string version() const override { return version_; }

  std::vector<double> score(std::span<const TextItem> items, std::size_t jobs) override {
    std::vector<double> out(items.size());
    parallel_chunks(items.size(), 1024, jobs, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out[i] = model_.probability(items[i].text);
    });
    return out;
  }

  const ScorerModel& model() const noexcept { return model_; }

 private:
  ScorerModel model_;
  std::string version_;
};

struct ExternalScorerOptions {
  std::vector<std::string> command;
  std::chrono::milliseconds timeout{60'000};  // per batch
  std::size_t batch_size = 256;
  std::size_t workers = 1;
  std::string declared_version;  // optional, folded into the cache key
};

inline constexpr int kProtocolVersion = 1;

/// Scorer running in child processes that speak wire protocol v1 over their
/// standard streams:
///
///   -> {"op":"hello"}              <- {"protocol":1,"name":"..."}
///   -> {"id":"...","text":"..."}   <- {"id":"...","p":0.93}
///
/// Responses within a batch may come back in any order but must match the
/// request ids one to one. Each worker process owns a disjoint set of
/// batches; results are merged by item index.
class ExternalScorer final : public Scorer {
 public:
  ExternalScorer(std::string name, ExternalScorerOptions options) : name_(std::move(name)), opt_(std::move(options)) {
    if (opt_.command.empty()) throw ConfigError("external scorer '" + name_ + "' has no command");
    if (opt_.batch_size == 0) throw ConfigError("batch size must be positive");
    if (opt_.workers == 0) opt_.workers = 1;
  }

  std::string version() const override {
    Fingerprint fp;
    for (const auto& a : opt_.command) fp.field(a);
    fp.field(opt_.declared_version);
    return "external:" + fp.hex();
  }

  std::vector<double> score(std::span<const TextItem> items, std::size_t jobs) override {
    std::vector<double> out(items.size(), std::nan(""));
    if (items.empty()) return out;
    const std::size_t batches = (items.size() + opt_.batch_size - 1) / opt_.batch_size;
    const std::size_t workers = std::clamp<std::size_t>(std::min(opt_.workers, std::max<std::size_t>(jobs, 1)), 1, batches);

    // Lowest failing batch wins so the reported error does not depend on timing.
    std::vector<std::exception_ptr> errors(batches);
    auto run_worker = [&](std::size_t w) {
      std::size_t b = w;
      try {
        Subprocess proc(opt_.command);
        handshake(proc);
        for (; b < batches; b += workers) {
          const std::size_t begin = b * opt_.batch_size;
          const std::size_t end = std::min(items.size(), begin + opt_.batch_size);
          run_batch(proc, items, begin, end, out);
        }
        proc.finish();
      } catch (...) {
        errors[std::min(b, batches - 1)] = std::current_exception();
      }
    };

    if (workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run_worker, w);
      for (auto& t : threads) t.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    return out;
  }

  const std::string& name() const noexcept { return name_; }
  const std::string& handshake_name() const noexcept { return handshake_name_; }

 private:
  std::string prefix() const { return "scorer '" + name_ + "': "; }

  void handshake(Subprocess& proc) {
    if (!proc.write_all("{\"op\":\"hello\"}\n"))
      throw ScoringError(prefix() + "process exited before the handshake");
    std::string line;
    const auto deadline = std::chrono::steady_clock::now() + opt_.timeout;
    switch (proc.read_line(line, deadline)) {
      case Subprocess::ReadStatus::Timeout:
        throw ScoringError(prefix() + "timed out waiting for the handshake");
      case Subprocess::ReadStatus::Eof:
        throw ScoringError(prefix() + "process exited before the handshake");
      case Subprocess::ReadStatus::Line:
        break;
    }
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("protocol") || !j["protocol"].is_number_integer() ||
        !j.contains("name") || !j["name"].is_string())
      throw ProtocolError(prefix() + "invalid handshake response '" + line + "'");
    if (j["protocol"].get<int>() != kProtocolVersion)
      throw ProtocolError(prefix() + "speaks protocol " + j["protocol"].dump() + ", expected " +
                          std::to_string(kProtocolVersion));
    std::lock_guard lock(mutex_);
    handshake_name_ = j["name"].get<std::string>();
  }

  void run_batch(Subprocess& proc, std::span<const TextItem> items, std::size_t begin, std::size_t end,
                 std::vector<double>& out) {
    std::unordered_map<std::string, std::size_t> pending;
    std::string request;
    for (std::size_t i = begin; i < end; ++i) {
      pending.emplace(items[i].id, i);
      request += json{{"id", items[i].id}, {"text", items[i].text.text}}.dump();
      request += '\n';
    }
    if (!proc.write_all(request))
      throw ScoringError(prefix() + "process exited while receiving batch starting at id '" + items[begin].id + "'");

    const auto deadline = std::chrono::steady_clock::now() + opt_.timeout;
    auto first_pending = [&] {
      std::size_t lowest = end;
      for (const auto& [id, i] : pending) lowest = std::min(lowest, i);
      return items[lowest].id;
    };
    std::string line;
    while (!pending.empty()) {
      switch (proc.read_line(line, deadline)) {
        case Subprocess::ReadStatus::Timeout:
          throw ScoringError(prefix() + "timed out after " + std::to_string(opt_.timeout.count()) +
                             " ms waiting for id '" + first_pending() + "'");
        case Subprocess::ReadStatus::Eof:
          throw ScoringError(prefix() + "process exited before answering id '" + first_pending() + "'");
        case Subprocess::ReadStatus::Line:
          break;
      }
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw ProtocolError(prefix() + "malformed response '" + line + "'");
      if (j.contains("error")) {
        const std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : first_pending();
        throw ScoringError(prefix() + "error response for id '" + id + "': " + j["error"].dump());
      }
      if (!j.contains("id") || !j["id"].is_string()) throw ProtocolError(prefix() + "response without id '" + line + "'");
      const auto id = j["id"].get<std::string>();
      auto it = pending.find(id);
      if (it == pending.end()) throw ProtocolError(prefix() + "unexpected or duplicate response id '" + id + "'");
      if (!j.contains("p") || !j["p"].is_number())
        throw ProtocolError(prefix() + "response for id '" + id + "' has no numeric p");
      const double p = j["p"].get<double>();
      if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw ProtocolError(prefix() + "probability " + j["p"].dump() + " for id '" + id + "' is outside [0,1]");
      out[it->second] = p;
      pending.erase(it);
    }
  }

  std::string name_;
  ExternalScorerOptions opt_;
  std::mutex mutex_;
  std::string handshake_name_;
};

}  // namespace supportive
