#pragma once

// Aggregate Monte Carlo over R_t.
//
// One step draws R_{t+1} ~ Binomial(M − 1 + M·R_t, ε): the oracle prefix's
// M − 1 non-oracle slots plus M slots per erroneous candidate, all with the
// same success probability. Cost per step is O(1) in R_t.

#include <cstdint>
#include <optional>
#include <vector>

#include "listdec/binomial.hpp"
#include "listdec/model.hpp"
#include "listdec/parallel.hpp"
#include "listdec/stats.hpp"

namespace listdec {

struct ErrorCountState {
  int step = 0;
  std::uint64_t count = 0;
};

/// Advances R_t by one step. Throws CountOverflow if the slot count exceeds 2^62.
inline ErrorCountState gw_step(ErrorCountState state, const ModelParams& params, StreamEngine& eng) {
  if (state.step >= params.horizon()) throw InvalidParam("gw_step past horizon");
  const std::uint64_t M = params.M();
  if (state.count > (kMaxBinomialTrials - (M - 1)) / M)
    throw CountOverflow("erroneous count exceeds the binomial trial limit at step " +
                        std::to_string(state.step + 1));
  const std::uint64_t slots = (M - 1) + M * state.count;
  return {state.step + 1, sample_binomial(slots, params.epsilon(), eng)};
}

struct CountTrajectory {
  /// R_0..R_k; k = horizon unless aborted.
  std::vector<std::uint64_t> counts;
  /// Step whose draw overflowed, if any.
  std::optional<int> aborted_at;
};

inline CountTrajectory run_count_trial(const ModelParams& params, RandomSource rng) {
  StreamEngine eng(rng);
  CountTrajectory traj;
  traj.counts.reserve(static_cast<std::size_t>(params.horizon()) + 1);
  ErrorCountState state;
  traj.counts.push_back(0);
  while (state.step < params.horizon()) {
    try {
      state = gw_step(state, params, eng);
    } catch (const CountOverflow&) {
      traj.aborted_at = state.step + 1;
      break;
    }
    traj.counts.push_back(state.count);
  }
  return traj;
}

namespace detail {

struct TrajectoryAccumulator {
  std::vector<MomentAccumulator> per_step;
  std::uint64_t trials = 0;
  std::uint64_t aborted = 0;

  void add(const std::vector<std::uint64_t>& counts, bool aborted_flag) {
    ++trials;
    if (aborted_flag) ++aborted;
    for (std::size_t t = 0; t < counts.size() && t < per_step.size(); ++t)
      per_step[t].add(static_cast<double>(counts[t]));
  }

  void merge(const TrajectoryAccumulator& o) {
    for (std::size_t t = 0; t < per_step.size(); ++t) per_step[t].merge(o.per_step[t]);
    trials += o.trials;
    aborted += o.aborted;
  }

  [[nodiscard]] SummaryStats summary() const {
    SummaryStats s;
    s.trials = trials;
    s.aborted_trials = aborted;
    s.steps.reserve(per_step.size());
    for (const auto& a : per_step) s.steps.push_back(step_stats(a));
    return s;
  }
};

}  // namespace detail

/// Trial i draws from RandomSource{seed, i}. Aborted trials contribute to the
/// steps they completed only. Output is independent of `workers` (0 = all cores).
inline SummaryStats run_batch(const ModelParams& params, std::uint64_t trials, std::uint64_t seed,
                              unsigned workers = 0) {
  if (trials < 1) throw InvalidParam("trials must be >= 1");
  const auto steps = static_cast<std::size_t>(params.horizon()) + 1;
  auto acc = chunked_reduce(
      trials, workers,
      [steps] {
        detail::TrajectoryAccumulator a;
        a.per_step.resize(steps);
        return a;
      },
      [&](detail::TrajectoryAccumulator& a, std::uint64_t i) {
        const auto traj = run_count_trial(params, RandomSource{seed, i});
        a.add(traj.counts, traj.aborted_at.has_value());
      },
      [](detail::TrajectoryAccumulator& into, const detail::TrajectoryAccumulator& from) { into.merge(from); });
  return acc.summary();
}

}  // namespace listdec
