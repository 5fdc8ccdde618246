#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "labgauge/expr.hpp"

namespace labgauge {

/// Deterministic sample-point and random-field source.  All randomness in the
/// library flows through this type so that a (scenario, seed) pair fully
/// determines every verdict, on every platform (mt19937_64 is bit-exact).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  /// Uniform double in [0, 1).
  double unit() { return (eng_() >> 11) * (1.0 / 9007199254740992.0); }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [0, n).
  int below(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

  /// Nonzero integer in [-bound, bound].
  int small_nonzero(int bound) {
    int v = below(2 * bound) - bound;
    return v >= 0 ? v + 1 : v;
  }

  /// Point in the chart's sampling box (domain_hint or default [-1,1]^dim).
  std::vector<double> point(const Chart& chart);

  /// Random polynomial with integer coefficients in [-3,3]\{0}, at most
  /// `terms` monomials, each of total degree <= `degree`.
  SmoothField polynomial(const Chart& chart, int degree, int terms);

  /// Random tangent vector with entries in [-1, 1).
  std::vector<double> tangent(int dim);

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace labgauge
