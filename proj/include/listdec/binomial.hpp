#pragma once

// Exact Binomial(n, p) variates for n up to 2^62.
//
// Small means (n * min(p, 1-p) < 10) use sequential inversion from the mode-0
// mass; larger means use Hormann's BTRS transformed rejection with squeeze.
// Both realize the exact law up to floating-point rounding in the density
// evaluation. The BTRS acceptance test is written in terms of integer
// differences (k - m) and log1p so it stays accurate when n is ~1e18.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "listdec/random.hpp"

namespace listdec {

inline constexpr std::uint64_t kMaxBinomialTrials = std::uint64_t{1} << 62;

namespace detail {

/// log(k!) - [(k + 1/2) log(k + 1) - (k + 1) + log(sqrt(2 pi))]
inline double stirling_tail(std::int64_t k) {
  static constexpr double kTable[10] = {
      0.0810614667953272,  0.0413406959554092,  0.0276779256849983,
      0.02079067210376509, 0.0166446911898211,  0.0138761288230707,
      0.0118967099458917,  0.010411265261972,   0.00925546218271273,
      0.00833056343336287};
  if (k < 10) return kTable[k];
  const double kp1 = static_cast<double>(k) + 1.0;
  const double r = 1.0 / kp1;
  const double r2 = r * r;
  return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - (1.0 / 1188.0) * r2) * r2) * r2) * r2) * r;
}

// Inversion for n*p < 10, p <= 1/2.
inline std::uint64_t binomial_inversion(std::uint64_t n, double p, StreamEngine& eng) {
  const double q = 1.0 - p;
  const double r = p / q;
  const double p0 = std::exp(static_cast<double>(n) * std::log1p(-p));
  for (;;) {
    double u = eng.uniform();
    double pk = p0;
    std::uint64_t k = 0;
    // The tail beyond ~110 is below 1e-60 for means under 10; a walk that
    // runs past it only happens through rounding and is redrawn.
    while (u >= pk) {
      u -= pk;
      if (k >= n || k > 110) break;
      pk *= r * static_cast<double>(n - k) / static_cast<double>(k + 1);
      ++k;
    }
    if (u < pk) return k;
  }
}

// BTRS, p <= 1/2, n*p >= 10.
inline std::uint64_t binomial_btrs(std::uint64_t n, double p, StreamEngine& eng) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const auto m = static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
  const auto ni = static_cast<std::int64_t>(n);
  const double md = static_cast<double>(m);
  // log(p (n - m + 1) / (q (m + 1))), a ratio close to 1.
  const double log_ratio_mode = std::log((p * (nd - md + 1.0)) / (q * (md + 1.0)));

  for (;;) {
    const double u = eng.uniform() - 0.5;
    double v = eng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + c);
    if (kf < 0.0 || kf > nd) continue;
    const auto k = static_cast<std::int64_t>(kf);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (v <= 0.0) continue;

    v = std::log(v * alpha / (a / (us * us) + b));
    const std::int64_t d = k - m;
    const double dd = static_cast<double>(d);
    const double kd = static_cast<double>(k);
    // log f(k)/f(m), regrouped from the textbook form of the BTRS bound.
    const double bound = dd * log_ratio_mode -
                         (kd + 0.5) * std::log1p(dd / (md + 1.0)) +
                         (kd + 0.5) * std::log1p(-dd / (nd - md + 1.0)) +
                         (nd + 1.0) * std::log1p(dd / (nd - kd + 1.0)) +
                         stirling_tail(m) + stirling_tail(ni - m) -
                         stirling_tail(k) - stirling_tail(ni - k);
    if (v <= bound) return static_cast<std::uint64_t>(k);
  }
}

}  // namespace detail

/// One exact Binomial(n, p) draw. Throws std::domain_error on n > 2^62 or p outside [0, 1].
inline std::uint64_t sample_binomial(std::uint64_t n, double p, StreamEngine& eng) {
  if (n > kMaxBinomialTrials) throw std::domain_error("binomial: n exceeds 2^62");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial: p outside [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  const std::uint64_t k = static_cast<double>(n) * pp < 10.0
                              ? detail::binomial_inversion(n, pp, eng)
                              : detail::binomial_btrs(n, pp, eng);
  return flip ? n - k : k;
}

}  // namespace listdec
