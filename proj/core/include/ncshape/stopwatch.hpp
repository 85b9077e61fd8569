#pragma once

#include <chrono>

namespace ncshape {

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  double elapsed_ms() const {
    const auto now = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(now - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

} // namespace ncshape
