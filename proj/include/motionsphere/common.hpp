#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace motionsphere {

// Row-major storage so that a time sample (one matrix row) is contiguous
// and can be viewed as a k x 3 pose without copying.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto process exit codes.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Incompatible shapes or sizes.
struct DimensionError : Error {
  using Error::Error;
};

/// Input outside an operation's mathematical domain (e.g. antipodal points).
struct DomainError : Error {
  using Error::Error;
};

/// Degenerate data that has no meaningful result (e.g. a constant curve).
struct DegenerateInputError : Error {
  using Error::Error;
};

/// Iteration budget exhausted before reaching the requested tolerance.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, double residual, int iterations)
      : Error(msg), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

/// Malformed file content; message carries file and line context.
struct ParseError : Error {
  using Error::Error;
};

/// Non-finite loss encountered during optimization.
struct TrainingDivergedError : Error {
  TrainingDivergedError(const std::string& msg, int epoch) : Error(msg), epoch(epoch) {}
  int epoch;
};

// ---------------------------------------------------------------------------
// Deterministic random numbers.
//
// std::mt19937_64 output is pinned by the standard, but the std distributions
// are not; every value derived from the engine goes through the mappings
// below so that identical seeds give identical streams everywhere.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(split_mix(seed)) {}

  std::uint64_t next_u64() {
    // xorshift* generator; one 64-bit word per call.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached spare; keeps the stream
  /// position independent of call parity).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Modulo bias is irrelevant at these ranges (n << 2^64).
    return next_u64() % n;
  }

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[i], p[j]);
    }
    return p;
  }

 private:
  static std::uint64_t split_mix(std::uint64_t x) {
    // SplitMix64 scrambles small seeds (0, 1, 2, ...) into good states.
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    x = x ^ (x >> 31);
    return x ? x : 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Small shared helpers.
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit over a byte range.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline bool all_finite(const RowMat& m) { return m.allFinite(); }

/// Decimal form that parses back to the identical double (17 significant
/// digits is always sufficient).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace motionsphere
