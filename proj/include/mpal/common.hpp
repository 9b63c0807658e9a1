#pragma once
// Shared primitives: particle configurations, the error taxonomy, logging,
// binomial confidence intervals, and fixed-precision number formatting.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpal {

// A configuration of N particles on the one-dimensional lattice.
using Config = std::vector<int>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------- error taxonomy ----------
// UsageError:     a caller broke an operation precondition (maps to exit 2).
// ConfigError:    invalid experiment configuration or resource cap (exit 2).
// NumericalError: solver-contract or iteration diagnostics (exit 3).
// InternalError:  invariant breach inside the library, i.e. a bug (exit 3).

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// ---------- logging ----------

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

// MPAL_LOG=quiet|info|debug, default quiet. Parsed once per process.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("MPAL_LOG");
    if (env == nullptr) return LogLevel::Quiet;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Quiet;
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::fprintf(stderr, "[mpal] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::fprintf(stderr, "[mpal:debug] %s\n", msg.c_str());
}

// ---------- formatting ----------

// Canonical number rendering for emitted files: up to 17 significant digits,
// enough to round-trip any double through strtod.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_u64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(v));
  return buf;
}

// ---------- binomial confidence interval ----------

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval at 95% coverage. Zero trials yield the trivial [0,1].
inline Interval wilson95(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The exact interval always contains p; guard the endpoints against the
  // one-ulp rounding that would otherwise exclude p at 0 or 1.
  return {std::min(p, std::max(0.0, center - half)), std::max(p, std::min(1.0, center + half))};
}

// ---------- hashing ----------

struct ConfigHash {
  std::size_t operator()(const Config& c) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (int v : c) {
      std::uint64_t z = h + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 1);
      z ^= z >> 30;
      z *= 0xBF58476D1CE4E5B9ull;
      z ^= z >> 27;
      h = z;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

}  // namespace mpal
