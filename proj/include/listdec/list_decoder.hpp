#pragma once

/**
 * Explicit list decoding.
 *
 * decode() starts from L_0 = {empty}, and at every step asks the eligibility
 * model about every (candidate, token) pair. Eligible pairs become the next
 * list. Each candidate carries a cumulative log score; the output is the
 * highest-scoring candidate at the horizon (ties: lexicographically smallest).
 *
 * Without a cap the list can grow like (Mε)^t, so a hard guard of 2^20
 * candidates raises ListExploded. With a cap, the list is cut to the top-cap
 * scores after each step; the cut is oracle-blind and may drop the oracle.
 * Once the oracle is gone every candidate may die, leaving nothing to select;
 * such a trial is a miss.
 */

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "listdec/model.hpp"
#include "listdec/parallel.hpp"
#include "listdec/stats.hpp"

namespace listdec {

inline constexpr std::size_t kDefaultListGuard = std::size_t{1} << 20;

enum class Selection { ArgmaxScore };

struct DecodeConfig {
  std::optional<std::size_t> cap;
  ScorerPolicy scorer{};
  Selection selection = Selection::ArgmaxScore;
  std::size_t list_guard = kDefaultListGuard;
};

struct DecodeResult {
  std::vector<Token> selected;
  bool matched_oracle = false;
  /// R_0..R_N; R_t counts erroneous candidates produced at step t, before any cap cut.
  std::vector<std::uint64_t> r_trajectory;
  bool truncated = false;
  bool oracle_dropped = false;
  /// The list died out after the cap dropped the oracle; nothing was selected.
  bool extinct = false;
};

/// Orders by score descending, then token sequence ascending.
inline bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.log_score != b.log_score) return a.log_score > b.log_score;
  return a.tokens < b.tokens;
}

template <EligibilityModel Model>
CandidateList extend(const CandidateList& list, const OracleSequence& oracle, const ModelParams& params,
                     RandomSource rng, const Model& model,
                     std::size_t guard = std::numeric_limits<std::size_t>::max()) {
  if (list.step >= params.horizon()) throw InvalidParam("extend past horizon");
  CandidateList next;
  next.step = list.step + 1;
  next.truncated = list.truncated;
  next.oracle_dropped = list.oracle_dropped;
  for (const auto& cand : list.candidates) {
    for (Token tok = 0; tok < params.M(); ++tok) {
      const Eligibility e = model(oracle, cand, tok, params, rng);
      if (!e.eligible) continue;
      if (next.candidates.size() >= guard)
        throw ListExploded("candidate list exceeded " + std::to_string(guard) + " at step " +
                           std::to_string(next.step));
      next.candidates.push_back(cand.extended(tok, e.score, is_oracle_continuation(oracle, cand, tok)));
    }
  }
  return next;
}

inline CandidateList extend(const CandidateList& list, const OracleSequence& oracle, const ModelParams& params,
                            RandomSource rng) {
  return extend(list, oracle, params, rng, SyntheticModel{});
}

/// Keeps the `cap` best candidates by ranks_before.
inline CandidateList truncate(CandidateList list, std::size_t cap) {
  if (cap < 1) throw InvalidParam("cap must be >= 1");
  if (list.candidates.size() <= cap) return list;
  const bool had_oracle = list.erroneous_count() < list.candidates.size();
  std::partial_sort(list.candidates.begin(), list.candidates.begin() + static_cast<std::ptrdiff_t>(cap),
                    list.candidates.end(), ranks_before);
  list.candidates.resize(cap);
  list.truncated = true;
  if (had_oracle && list.erroneous_count() == list.candidates.size()) list.oracle_dropped = true;
  return list;
}

/// Oracle-blind argmax over log_score.
inline std::vector<Token> final_select(const CandidateList& list) {
  if (list.candidates.empty()) throw InvalidParam("final_select on an empty list");
  return std::min_element(list.candidates.begin(), list.candidates.end(), ranks_before)->tokens;
}

template <EligibilityModel Model>
DecodeResult decode(const ModelParams& params, const OracleSequence& oracle, const DecodeConfig& config,
                    RandomSource rng, const Model& model) {
  const std::size_t guard = config.cap ? std::numeric_limits<std::size_t>::max() : config.list_guard;
  DecodeResult result;
  result.r_trajectory.reserve(static_cast<std::size_t>(params.horizon()) + 1);
  CandidateList list = CandidateList::initial();
  result.r_trajectory.push_back(0);
  while (list.step < params.horizon()) {
    list = extend(list, oracle, params, rng, model, guard);
    result.r_trajectory.push_back(list.erroneous_count());
    if (config.cap) list = truncate(std::move(list), *config.cap);
  }
  result.extinct = list.candidates.empty();
  if (!result.extinct) result.selected = final_select(list);
  result.matched_oracle = result.selected == oracle.tokens;
  result.truncated = list.truncated;
  result.oracle_dropped = list.oracle_dropped;
  return result;
}

inline DecodeResult decode(const ModelParams& params, const OracleSequence& oracle, const DecodeConfig& config,
                           RandomSource rng) {
  return decode(params, oracle, config, rng, SyntheticModel{config.scorer});
}

// ============================================================================
// Batches
// ============================================================================

struct AccuracyReport {
  std::uint64_t trials = 0;
  std::uint64_t exploded_trials = 0;
  std::uint64_t matched = 0;
  std::uint64_t zero_final = 0;
  std::uint64_t truncated_trials = 0;
  std::uint64_t oracle_dropped_trials = 0;
  std::uint64_t extinct_trials = 0;
  double accuracy = 0.0;  // over completed trials
  double ci95 = 0.0;      // normal half-width
  double zero_frac_final = 0.0;
  /// Per-step R_t statistics over completed trials.
  SummaryStats stats;
};

/// Streams for trial i: oracle instance seed = derive_seed(seed, {i, 0});
/// decode randomness = derive_stream(seed, {i, 1}).
inline AccuracyReport accuracy_estimate(const ModelParams& params, const DecodeConfig& config,
                                        std::uint64_t trials, std::uint64_t seed, unsigned workers = 0) {
  if (trials < 1) throw InvalidParam("trials must be >= 1");
  const auto steps = static_cast<std::size_t>(params.horizon()) + 1;

  struct Acc {
    std::vector<MomentAccumulator> per_step;
    std::uint64_t trials = 0, exploded = 0, matched = 0, zero_final = 0, truncated = 0, dropped = 0, extinct = 0;
  };

  auto acc = chunked_reduce(
      trials, workers,
      [steps] {
        Acc a;
        a.per_step.resize(steps);
        return a;
      },
      [&](Acc& a, std::uint64_t i) {
        ++a.trials;
        const auto oracle = make_oracle(params, derive_seed(seed, {i, 0}));
        DecodeResult r;
        try {
          r = decode(params, oracle, config, derive_stream(seed, {i, 1}));
        } catch (const ListExploded&) {
          ++a.exploded;
          return;
        }
        for (std::size_t t = 0; t < steps; ++t) a.per_step[t].add(static_cast<double>(r.r_trajectory[t]));
        a.matched += r.matched_oracle;
        a.zero_final += r.r_trajectory.back() == 0;
        a.truncated += r.truncated;
        a.dropped += r.oracle_dropped;
        a.extinct += r.extinct;
      },
      [](Acc& into, const Acc& from) {
        for (std::size_t t = 0; t < into.per_step.size(); ++t) into.per_step[t].merge(from.per_step[t]);
        into.trials += from.trials;
        into.exploded += from.exploded;
        into.matched += from.matched;
        into.zero_final += from.zero_final;
        into.truncated += from.truncated;
        into.dropped += from.dropped;
        into.extinct += from.extinct;
      });

  AccuracyReport rep;
  rep.trials = acc.trials;
  rep.exploded_trials = acc.exploded;
  rep.matched = acc.matched;
  rep.zero_final = acc.zero_final;
  rep.truncated_trials = acc.truncated;
  rep.oracle_dropped_trials = acc.dropped;
  rep.extinct_trials = acc.extinct;
  const std::uint64_t done = acc.trials - acc.exploded;
  if (done > 0) {
    const double n = static_cast<double>(done);
    rep.accuracy = static_cast<double>(acc.matched) / n;
    rep.ci95 = kZ95 * std::sqrt(rep.accuracy * (1.0 - rep.accuracy) / n);
    rep.zero_frac_final = static_cast<double>(acc.zero_final) / n;
  }
  rep.stats.trials = acc.trials;
  rep.stats.aborted_trials = acc.exploded;
  for (const auto& a : acc.per_step) rep.stats.steps.push_back(step_stats(a));
  return rep;
}

}  // namespace listdec
