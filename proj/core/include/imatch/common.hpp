#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace imatch {

// Base of the logarithm in every polylog constant (plan sizes, monitor
// windows). Natural by default.
enum class LogBase { Natural, Binary };

inline double log_in(LogBase base, double x) {
  return base == LogBase::Natural ? std::log(x) : std::log2(x);
}

std::string_view to_string(LogBase base);
LogBase parse_log_base(std::string_view name);

class TrialTimeout : public std::runtime_error {
 public:
  TrialTimeout() : std::runtime_error("trial exceeded its wall-clock budget") {}
};

// Cooperative wall-clock budget; long loops poll it.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(Clock::time_point at) : at_(at) {}
  static Deadline after(std::chrono::duration<double> budget) {
    return Deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(budget));
  }

  bool expired() const { return at_ && Clock::now() >= *at_; }
  void check() const {
    if (expired()) throw TrialTimeout();
  }

 private:
  std::optional<Clock::time_point> at_;
};

}  // namespace imatch
