#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace listdec {

inline constexpr double kZ95 = 1.959963984540054;

/// Streaming mean/variance (Welford) with Chan's pairwise merge.
struct MomentAccumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t zeros = 0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
    if (x == 0.0) ++zeros;
  }

  void merge(const MomentAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double delta = o.mean - mean;
    const double total = na + nb;
    mean += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    n += o.n;
    zeros += o.zeros;
  }

  [[nodiscard]] double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  [[nodiscard]] double standard_error() const {
    return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
  double center = 0.0;
  double half_width = 0.0;
};

inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kZ95) {
  if (n == 0) return {0.5, 0.5};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {center, half};
}

/// Per-step Monte Carlo summary.
struct StepStats {
  std::uint64_t trials = 0;  // completed trials that reached this step
  double mean_R = 0.0;
  double variance_R = 0.0;
  double se_R = 0.0;
  double ci95 = 0.0;  // normal half-width, 1.96 * se
  double zero_frac = 0.0;
  double zero_se = 0.0;    // binomial standard error of zero_frac
  double zero_ci95 = 0.0;  // Wilson half-width
};

struct SummaryStats {
  std::vector<StepStats> steps;  // index t = 0..N
  std::uint64_t trials = 0;
  std::uint64_t aborted_trials = 0;
};

inline StepStats step_stats(const MomentAccumulator& acc) {
  StepStats s;
  s.trials = acc.n;
  if (acc.n == 0) return s;
  s.mean_R = acc.mean;
  s.variance_R = acc.variance();
  s.se_R = acc.standard_error();
  s.ci95 = kZ95 * s.se_R;
  const double nn = static_cast<double>(acc.n);
  s.zero_frac = static_cast<double>(acc.zeros) / nn;
  s.zero_se = std::sqrt(s.zero_frac * (1.0 - s.zero_frac) / nn);
  s.zero_ci95 = wilson_interval(acc.zeros, acc.n).half_width;
  return s;
}

}  // namespace listdec
