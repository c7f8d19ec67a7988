#pragma once

#include <stdexcept>
#include <string>

namespace supportive {

/// Base class for every error raised by the toolkit. The exit code is what
/// the command-line front end returns when the error escapes a subcommand.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
  virtual const char* kind() const noexcept { return "error"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
  const char* kind() const noexcept override { return "config"; }
};

/// An upstream artifact is missing. Carries the subcommand that produces it.
class MissingArtifactError : public Error {
 public:
  MissingArtifactError(std::string artifact, std::string producer)
      : Error("missing artifact '" + artifact + "'; run '" + producer + "' first"),
        artifact_(std::move(artifact)),
        producer_(std::move(producer)) {}
  int exit_code() const noexcept override { return 3; }
  const char* kind() const noexcept override { return "missing-artifact"; }
  const std::string& artifact() const noexcept { return artifact_; }
  const std::string& producer() const noexcept { return producer_; }

 private:
  std::string artifact_;
  std::string producer_;
};

class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
  const char* kind() const noexcept override { return "data"; }
};

class IoError : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "io"; }
};

class EmptyCorpusError : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "empty-corpus"; }
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "insufficient-data"; }
};

class DegenerateTrainingError : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "degenerate-training"; }
};

class DimensionMismatchError : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "dimension-mismatch"; }
};

/// External scorer failed: crash, timeout, or an error response.
class ScoringError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
  const char* kind() const noexcept override { return "scoring"; }
};

/// External scorer answered, but the answer broke wire protocol v1.
class ProtocolError : public ScoringError {
 public:
  using ScoringError::ScoringError;
  const char* kind() const noexcept override { return "protocol"; }
};

}  // namespace supportive
