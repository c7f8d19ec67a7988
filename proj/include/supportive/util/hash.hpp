#pragma once

#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

namespace supportive {

// 64-bit FNV-1a. Stable across platforms and runs, which std::hash is not.
class Fingerprint {
 public:
  Fingerprint& update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= kPrime;
    }
    return *this;
  }

  // Field separator so that ("ab","c") and ("a","bc") hash differently.
  Fingerprint& field(std::string_view bytes) noexcept {
    update(bytes);
    return update(std::string_view("\x1f", 1));
  }

  Fingerprint& field(std::uint64_t value) noexcept { return field(std::to_string(value)); }

  std::uint64_t value() const noexcept { return state_; }

  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
      v >>= 4;
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t state_ = kOffset;
};

inline std::string fingerprint_of(std::string_view bytes) {
  return Fingerprint{}.update(bytes).hex();
}

/// Fingerprint of a file's bytes; empty string when the file cannot be read.
inline std::string fingerprint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  Fingerprint fp;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    fp.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return fp.hex();
}

}  // namespace supportive
