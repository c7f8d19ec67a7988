#pragma once

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "supportive/error.hpp"

namespace supportive {

/// A child process whose stdin and stdout are pipes owned by this object.
/// Destruction closes the pipes, kills the child if still running, and reaps it.
class Subprocess {
 public:
  enum class ReadStatus { Line, Eof, Timeout };

  explicit Subprocess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw ConfigError("empty scorer command");
    // Writes to a dead child must surface as EPIPE, not kill us.
    std::signal(SIGPIPE, SIG_IGN);

    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw ScoringError("pipe: " + std::string(std::strerror(errno)));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ScoringError("pipe: " + std::string(std::strerror(errno)));
    }

    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) throw ScoringError("fork: " + std::string(std::strerror(errno)));
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execvp(args[0], args.data());
      _exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    stdin_fd_ = to_child[1];
    stdout_fd_ = from_child[0];
  }

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  Subprocess(Subprocess&& other) noexcept { *this = std::move(other); }
  Subprocess& operator=(Subprocess&& other) noexcept {
    if (this != &other) {
      terminate();
      pid_ = std::exchange(other.pid_, -1);
      stdin_fd_ = std::exchange(other.stdin_fd_, -1);
      stdout_fd_ = std::exchange(other.stdout_fd_, -1);
      buffer_ = std::move(other.buffer_);
    }
    return *this;
  }

  ~Subprocess() { terminate(); }

  /// Returns false when the child has closed its end of the pipe.
  bool write_all(std::string_view data) {
    while (!data.empty()) {
      const ssize_t n = ::write(stdin_fd_, data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
  }

  /// Reads one '\n'-terminated line (without the terminator).
  ReadStatus read_line(std::string& line, std::chrono::steady_clock::time_point deadline) {
    for (;;) {
      if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
        line.assign(buffer_, 0, pos);
        buffer_.erase(0, pos + 1);
        return ReadStatus::Line;
      }
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) return ReadStatus::Timeout;
      const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      pollfd pfd{stdout_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait_ms + 1, 1 << 30)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::Eof;
      }
      if (rc == 0) continue;
      char buf[8192];
      const ssize_t n = ::read(stdout_fd_, buf, sizeof buf);
      if (n < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::Eof;
      }
      if (n == 0) {
        if (!buffer_.empty()) {
          line = std::exchange(buffer_, {});
          return ReadStatus::Line;
        }
        return ReadStatus::Eof;
      }
      buffer_.append(buf, static_cast<std::size_t>(n));
    }
  }

  void close_stdin() {
    if (stdin_fd_ >= 0) {
      ::close(stdin_fd_);
      stdin_fd_ = -1;
    }
  }

  /// Closes stdin and waits for a clean exit; returns the exit status.
  int finish() {
    close_stdin();
    if (pid_ <= 0) return -1;
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
    close_stdout();
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  pid_t pid() const noexcept { return pid_; }

 private:
  void close_stdout() {
    if (stdout_fd_ >= 0) {
      ::close(stdout_fd_);
      stdout_fd_ = -1;
    }
  }

  void terminate() noexcept {
    close_stdin();
    close_stdout();
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
};

}  // namespace supportive
