#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "affect/error.hpp"

namespace test {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("affect-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> sine(double freq, double rate, double seconds, double amp = 1.0,
                                double phase = 0.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate + phase);
  }
  return x;
}

/// True when fn throws affect::Error with exactly this code.
inline bool throws_code(const std::function<void()>& fn, affect::ErrorCode code) {
  try {
    fn();
  } catch (const affect::Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace test
