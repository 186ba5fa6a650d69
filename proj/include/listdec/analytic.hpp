#pragma once

// Closed-form bounds and exact laws for the erroneous-count process R_t.
//
// Under the equality classifier, each erroneous candidate has Binomial(M, eps)
// erroneous children and the oracle prefix adds Binomial(M-1, eps) new ones, so
// R_t is a Galton-Watson process with immigration and R_0 = 0.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "listdec/model.hpp"

namespace listdec {

/// Mε/(1 − Mε): the uniform-in-t ceiling on E[R_t] for Mε < 1.
inline double subcritical_mean_bound(const ModelParams& params) {
  if (regime(params) != Regime::Subcritical) throw NotSubcritical("mean bound requires M*eps < 1");
  const double me = params.branching_factor();
  return me / (1.0 - me);
}

/// Markov-inequality floor on P(R_t = 0), clamped at 0.
inline double accuracy_lower_bound(const ModelParams& params) {
  if (regime(params) != Regime::Subcritical) throw NotSubcritical("accuracy bound requires M*eps < 1");
  const double me = params.branching_factor();
  return std::max(0.0, (1.0 - 2.0 * me) / (1.0 - me));
}

/// (Mε)^t, the growth floor quoted for the supercritical regime.
inline double supercritical_floor(const ModelParams& params, int t) {
  if (regime(params) != Regime::Supercritical) throw NotSupercritical("growth floor requires M*eps > 1");
  return std::pow(params.branching_factor(), t);
}

struct BoundReport {
  Regime regime = Regime::Subcritical;
  /// Infinite outside the subcritical regime.
  double mean_bound = std::numeric_limits<double>::infinity();
  /// Clamped to [0, 1]; 0 (uninformative) outside the subcritical regime.
  double accuracy_bound = 0.0;
  ModelParams params;

  /// (Mε)^t in the supercritical regime, NaN otherwise.
  [[nodiscard]] double supercritical_floor(int t) const {
    return regime == Regime::Supercritical ? std::pow(params.branching_factor(), t)
                                           : std::numeric_limits<double>::quiet_NaN();
  }
};

inline BoundReport bound_report(const ModelParams& params) {
  BoundReport r{regime(params), std::numeric_limits<double>::infinity(), 0.0, params};
  if (r.regime == Regime::Subcritical) {
    r.mean_bound = subcritical_mean_bound(params);
    r.accuracy_bound = accuracy_lower_bound(params);
  }
  return r;
}

/// e_0..e_T from e_{t+1} = Mε e_t + (M−1)ε.
inline std::vector<double> exact_mean_trajectory(const ModelParams& params, int T) {
  if (T < 0) throw InvalidParam("T must be >= 0");
  const double growth = params.branching_factor();
  const double immigration = static_cast<double>(params.M() - 1) * params.epsilon();
  std::vector<double> e(static_cast<std::size_t>(T) + 1, 0.0);
  for (std::size_t t = 1; t < e.size(); ++t) e[t] = growth * e[t - 1] + immigration;
  return e;
}

/// Closed form of e_t; linear in t at Mε = 1.
inline double exact_mean_closed_form(const ModelParams& params, int t) {
  const double a = params.branching_factor();
  const double b = static_cast<double>(params.M() - 1) * params.epsilon();
  if (a == 1.0) return static_cast<double>(t) * b;
  return b * (std::pow(a, t) - 1.0) / (a - 1.0);
}

/// z_0..z_T with z_t = prod_{k<t} h(g^k(0)), where g(s) = (1−ε+εs)^M is the
/// offspring PGF and h(s) = (1−ε+εs)^(M−1) the immigration PGF.
inline std::vector<double> exact_zero_prob_trajectory(const ModelParams& params, int T) {
  if (T < 0) throw InvalidParam("T must be >= 0");
  const double eps = params.epsilon();
  const double M = params.M();
  std::vector<double> z(static_cast<std::size_t>(T) + 1, 1.0);
  double s = 0.0;  // g^k(0)
  for (std::size_t t = 1; t < z.size(); ++t) {
    const double base = 1.0 - eps + eps * s;
    z[t] = z[t - 1] * std::pow(base, M - 1.0);
    s = std::pow(base, M);
  }
  return z;
}

/// Exact pmf of R_t for t = 0..T.
using Distribution = std::map<std::uint64_t, double>;

/// Enumerates every eligibility outcome of every (candidate, token) slot
/// explicitly. Guarded to M <= 3, T <= 3.
inline std::vector<Distribution> brute_force_distribution(const ModelParams& params, int T) {
  if (params.M() > 3 || T > 3 || T < 0) throw TooLarge("brute force limited to M <= 3 and T <= 3");
  const double eps = params.epsilon();
  const std::uint64_t M = params.M();

  std::vector<Distribution> out;
  out.push_back({{0, 1.0}});
  for (int t = 0; t < T; ++t) {
    Distribution next;
    for (const auto& [r, pr] : out.back()) {
      // slots: M-1 non-oracle tokens after the oracle prefix, M per erroneous candidate
      const std::uint64_t slots = (M - 1) + M * r;
      // tally outcomes by number of eligible slots, then weight each tally
      std::vector<std::uint64_t> tally(slots + 1, 0);
      const std::uint64_t outcomes = std::uint64_t{1} << slots;
      for (std::uint64_t mask = 0; mask < outcomes; ++mask) ++tally[static_cast<std::size_t>(std::popcount(mask))];
      for (std::uint64_t k = 0; k <= slots; ++k) {
        const double w = static_cast<double>(tally[k]) * std::pow(eps, static_cast<double>(k)) *
                         std::pow(1.0 - eps, static_cast<double>(slots - k));
        if (w > 0.0) next[k] += pr * w;
      }
    }
    out.push_back(std::move(next));
  }
  return out;
}

inline double distribution_mean(const Distribution& d) {
  double m = 0.0;
  for (const auto& [k, p] : d) m += static_cast<double>(k) * p;
  return m;
}

inline double distribution_mass(const Distribution& d, std::uint64_t k) {
  auto it = d.find(k);
  return it == d.end() ? 0.0 : it->second;
}

}  // namespace listdec
