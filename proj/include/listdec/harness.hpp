#pragma once

// Sweep orchestration and report emission.
//
// CSV schema (header mandatory, '.' decimal separator, shortest round-trip
// doubles, empty field for an absent value):
//   engine,M,epsilon,m_eps,t,trials,mean_R,mean_ci95,zero_frac,zero_ci95,
//   exact_mean,exact_zero_prob,bound_mean,bound_accuracy,paper_floor,aborted_trials
// JSON output is an array of objects with the same keys; absent values are null.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "listdec/analytic.hpp"
#include "listdec/branching.hpp"
#include "listdec/list_decoder.hpp"
#include "listdec/model.hpp"

namespace listdec {

enum class Engine { Counts, Decode };

inline const char* to_string(Engine e) { return e == Engine::Counts ? "counts" : "decode"; }

struct SweepConfig {
  long long M = 20;
  std::vector<double> epsilon_grid;
  long long horizon = 30;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  Engine engine = Engine::Counts;
  DecodeConfig decode{};
};

struct SweepRow {
  Engine engine = Engine::Counts;
  std::uint32_t M = 0;
  double epsilon = 0.0;
  double m_eps = 0.0;
  int t = 0;
  std::uint64_t trials = 0;
  double mean_R = 0.0;
  double mean_ci95 = 0.0;
  double zero_frac = 0.0;
  double zero_ci95 = 0.0;
  double exact_mean = 0.0;
  double exact_zero_prob = 0.0;
  std::optional<double> bound_mean;
  std::optional<double> bound_accuracy;
  std::optional<double> paper_floor;
  std::uint64_t aborted_trials = 0;
};

inline constexpr std::array<std::string_view, 16> kSweepColumns = {
    "engine",     "M",               "epsilon",    "m_eps",          "t",           "trials",
    "mean_R",     "mean_ci95",       "zero_frac",  "zero_ci95",      "exact_mean",  "exact_zero_prob",
    "bound_mean", "bound_accuracy",  "paper_floor", "aborted_trials"};

// ============================================================================
// Grid parsing
// ============================================================================

namespace detail {

inline double parse_real(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw InvalidParam("not a number: '" + std::string(s) + "'");
  return v;
}

inline int decimal_places(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return 0;
  const auto exp = s.find_first_of("eE", dot);
  return static_cast<int>((exp == std::string_view::npos ? s.size() : exp) - dot - 1);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses "start:stop:step" or "a,b,c". Range points are snapped to the
/// decimal precision of the inputs so 0.005:0.095:0.005 yields 0.015, not
/// 0.015000000000000001. Result must be strictly increasing within [0, 1].
inline std::vector<double> parse_epsilon_grid(std::string_view text) {
  std::vector<double> grid;
  text = detail::trim(text);
  if (text.empty()) throw InvalidParam("empty epsilon grid");
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
      const auto c = text.find(':', pos);
      parts.push_back(detail::trim(text.substr(pos, c - pos)));
      if (c == std::string_view::npos) break;
      pos = c + 1;
    }
    if (parts.size() != 3) throw InvalidParam("range grid must be start:stop:step");
    const double start = detail::parse_real(parts[0]);
    const double stop = detail::parse_real(parts[1]);
    const double step = detail::parse_real(parts[2]);
    if (!(step > 0.0)) throw InvalidParam("grid step must be positive");
    const int places = std::max({detail::decimal_places(parts[0]), detail::decimal_places(parts[1]),
                                 detail::decimal_places(parts[2])});
    const double scale = std::pow(10.0, places);
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count < 1 || count > 1000000) throw InvalidParam("grid range is empty or too large");
    for (long long i = 0; i < count; ++i) {
      double v = start + static_cast<double>(i) * step;
      if (places <= 15) v = std::round(v * scale) / scale;
      grid.push_back(v);
    }
  } else {
    std::size_t pos = 0;
    while (true) {
      const auto c = text.find(',', pos);
      grid.push_back(detail::parse_real(detail::trim(text.substr(pos, c - pos))));
      if (c == std::string_view::npos) break;
      pos = c + 1;
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw InvalidParam("grid values must lie in [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidParam("grid must be strictly increasing");
  }
  return grid;
}

// ============================================================================
// Sweep
// ============================================================================

namespace detail {

inline void attach_references(std::vector<SweepRow>& rows, const ModelParams& params) {
  const auto exact_mean = exact_mean_trajectory(params, params.horizon());
  const auto exact_zero = exact_zero_prob_trajectory(params, params.horizon());
  const Regime reg = regime(params);
  for (auto& row : rows) {
    const auto t = static_cast<std::size_t>(row.t);
    row.exact_mean = exact_mean[t];
    row.exact_zero_prob = exact_zero[t];
    if (reg == Regime::Subcritical) {
      row.bound_mean = subcritical_mean_bound(params);
      row.bound_accuracy = accuracy_lower_bound(params);
    } else if (reg == Regime::Supercritical) {
      row.paper_floor = supercritical_floor(params, row.t);
    }
  }
}

}  // namespace detail

/// Rows for one grid point, t = 0..horizon.
inline std::vector<SweepRow> rows_from_stats(Engine engine, const ModelParams& params, const SummaryStats& stats) {
  std::vector<SweepRow> rows;
  rows.reserve(stats.steps.size());
  for (std::size_t t = 0; t < stats.steps.size(); ++t) {
    const auto& s = stats.steps[t];
    SweepRow r;
    r.engine = engine;
    r.M = params.M();
    r.epsilon = params.epsilon();
    r.m_eps = params.branching_factor();
    r.t = static_cast<int>(t);
    r.trials = s.trials;
    r.mean_R = s.mean_R;
    r.mean_ci95 = s.ci95;
    r.zero_frac = s.zero_frac;
    r.zero_ci95 = s.zero_ci95;
    r.aborted_trials = stats.aborted_trials;
    rows.push_back(r);
  }
  detail::attach_references(rows, params);
  return rows;
}

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Decode engine only, one per grid point.
  std::vector<AccuracyReport> accuracy;
};

/// Grid point g runs with seed derive_seed(config.seed, {g}). Rows are ordered
/// by (epsilon, t) and are identical for any worker count.
inline SweepResult run_sweep(const SweepConfig& config, unsigned workers = 0) {
  if (config.epsilon_grid.empty()) throw InvalidParam("empty epsilon grid");
  if (config.trials < 1) throw InvalidParam("trials must be >= 1");
  for (std::size_t i = 1; i < config.epsilon_grid.size(); ++i)
    if (!(config.epsilon_grid[i] > config.epsilon_grid[i - 1]))
      throw InvalidParam("grid must be strictly increasing");
  std::vector<ModelParams> points;
  for (double eps : config.epsilon_grid) points.push_back(make_params(config.M, eps, config.horizon));

  SweepResult out;
  for (std::size_t g = 0; g < points.size(); ++g) {
    const auto& params = points[g];
    const std::uint64_t seed = derive_seed(config.seed, {g});
    std::vector<SweepRow> rows;
    if (config.engine == Engine::Counts) {
      rows = rows_from_stats(Engine::Counts, params, run_batch(params, config.trials, seed, workers));
    } else {
      auto rep = accuracy_estimate(params, config.decode, config.trials, seed, workers);
      rows = rows_from_stats(Engine::Decode, params, rep.stats);
      out.accuracy.push_back(std::move(rep));
    }
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return out;
}

// ============================================================================
// Bounds report
// ============================================================================

struct BoundsSummary {
  std::uint32_t M = 0;
  double epsilon = 0.0;
  double m_eps = 0.0;
  int t = 0;
  Regime regime = Regime::Subcritical;
  std::optional<double> bound_mean;
  std::optional<double> bound_accuracy;
  std::optional<double> paper_floor;
  /// (Mε)^t − 1, the floor that holds for the equality model.
  std::optional<double> model_floor;
  double exact_mean = 0.0;
  double exact_zero_prob = 0.0;
};

inline BoundsSummary print_bounds(long long M, double epsilon, long long t) {
  if (t < 0) throw InvalidParam("t must be >= 0");
  const auto params = make_params(M, epsilon, std::max(1LL, t));
  BoundsSummary b;
  b.M = params.M();
  b.epsilon = epsilon;
  b.m_eps = params.branching_factor();
  b.t = static_cast<int>(t);
  b.regime = regime(params);
  if (b.regime == Regime::Subcritical) {
    b.bound_mean = subcritical_mean_bound(params);
    b.bound_accuracy = accuracy_lower_bound(params);
  } else if (b.regime == Regime::Supercritical) {
    b.paper_floor = supercritical_floor(params, b.t);
    b.model_floor = *b.paper_floor - 1.0;
  }
  b.exact_mean = exact_mean_trajectory(params, b.t).back();
  b.exact_zero_prob = exact_zero_prob_trajectory(params, b.t).back();
  return b;
}

// ============================================================================
// Emission
// ============================================================================

/// Shortest round-trip decimal; locale-independent.
inline std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string{}; }

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) os << (i ? "," : "") << kSweepColumns[i];
  os << '\n';
  for (const auto& r : rows) {
    os << to_string(r.engine) << ',' << r.M << ',' << format_real(r.epsilon) << ',' << format_real(r.m_eps) << ','
       << r.t << ',' << r.trials << ',' << format_real(r.mean_R) << ',' << format_real(r.mean_ci95) << ','
       << format_real(r.zero_frac) << ',' << format_real(r.zero_ci95) << ',' << format_real(r.exact_mean) << ','
       << format_real(r.exact_zero_prob) << ',' << format_optional(r.bound_mean) << ','
       << format_optional(r.bound_accuracy) << ',' << format_optional(r.paper_floor) << ',' << r.aborted_trials
       << '\n';
  }
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json rows_to_json(const std::vector<SweepRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["engine"] = to_string(r.engine);
    o["M"] = r.M;
    o["epsilon"] = r.epsilon;
    o["m_eps"] = r.m_eps;
    o["t"] = r.t;
    o["trials"] = r.trials;
    o["mean_R"] = r.mean_R;
    o["mean_ci95"] = r.mean_ci95;
    o["zero_frac"] = r.zero_frac;
    o["zero_ci95"] = r.zero_ci95;
    o["exact_mean"] = r.exact_mean;
    o["exact_zero_prob"] = r.exact_zero_prob;
    o["bound_mean"] = optional_json(r.bound_mean);
    o["bound_accuracy"] = optional_json(r.bound_accuracy);
    o["paper_floor"] = optional_json(r.paper_floor);
    o["aborted_trials"] = r.aborted_trials;
    arr.push_back(std::move(o));
  }
  return arr;
}

inline void write_json(std::ostream& os, const std::vector<SweepRow>& rows) { os << rows_to_json(rows).dump(2) << '\n'; }

inline nlohmann::ordered_json bounds_to_json(const BoundsSummary& b) {
  nlohmann::ordered_json o;
  o["M"] = b.M;
  o["epsilon"] = b.epsilon;
  o["m_eps"] = b.m_eps;
  o["t"] = b.t;
  o["regime"] = to_string(b.regime);
  o["bound_mean"] = optional_json(b.bound_mean);
  o["bound_accuracy"] = optional_json(b.bound_accuracy);
  o["paper_floor"] = optional_json(b.paper_floor);
  o["model_floor"] = optional_json(b.model_floor);
  o["exact_mean"] = b.exact_mean;
  o["exact_zero_prob"] = b.exact_zero_prob;
  return o;
}

inline std::string bounds_to_text(const BoundsSummary& b) {
  std::ostringstream os;
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("(absent)"); };
  os << "M               " << b.M << '\n'
     << "epsilon         " << format_real(b.epsilon) << '\n'
     << "M*eps           " << format_real(b.m_eps) << '\n'
     << "regime          " << to_string(b.regime) << '\n'
     << "bound_mean      " << opt(b.bound_mean) << '\n'
     << "bound_accuracy  " << opt(b.bound_accuracy) << '\n'
     << "paper_floor     " << opt(b.paper_floor) << "   (M*eps)^t at t=" << b.t << '\n'
     << "model_floor     " << opt(b.model_floor) << "   (M*eps)^t - 1\n"
     << "exact_mean      " << format_real(b.exact_mean) << "   E[R_t] at t=" << b.t << '\n'
     << "exact_zero_prob " << format_real(b.exact_zero_prob) << "   P(R_t = 0) at t=" << b.t << '\n';
  return os.str();
}

}  // namespace listdec
