#pragma once

/**
 * Core model types for list decoding over a token space of size M.
 *
 * An autoregressive generator with list decoding keeps a candidate list L_t.
 * At each step a binary classifier marks every token of every candidate as
 * eligible or not; eligible extensions form L_{t+1}. The synthetic classifier
 * shipped here has perfect recall of the oracle continuation and marks every
 * other (prefix, token) pair eligible independently with probability exactly
 * epsilon.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "listdec/random.hpp"

namespace listdec {

// ============================================================================
// Errors
// ============================================================================

struct InvalidParam : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotSubcritical : std::domain_error {
  using std::domain_error::domain_error;
};
struct NotSupercritical : std::domain_error {
  using std::domain_error::domain_error;
};
struct TooLarge : std::length_error {
  using std::length_error::length_error;
};
struct CountOverflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};
struct ListExploded : std::length_error {
  using std::length_error::length_error;
};

// ============================================================================
// Parameters and regime
// ============================================================================

using Token = std::uint32_t;

/// Half-width of the band around M*eps = 1 classified as critical.
inline constexpr double kCriticalTolerance = 1e-9;

enum class Regime { Subcritical, Critical, Supercritical };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::Supercritical: return "Supercritical";
  }
  return "?";
}

/// (M, epsilon, horizon). Construct through make_params.
class ModelParams {
 public:
  [[nodiscard]] std::uint32_t M() const noexcept { return m_; }
  [[nodiscard]] double epsilon() const noexcept { return eps_; }
  [[nodiscard]] int horizon() const noexcept { return horizon_; }
  /// M * epsilon, recomputed on every call.
  [[nodiscard]] double branching_factor() const noexcept { return static_cast<double>(m_) * eps_; }

  friend ModelParams make_params(long long M, double epsilon, long long horizon);

 private:
  ModelParams(std::uint32_t m, double eps, int horizon) : m_(m), eps_(eps), horizon_(horizon) {}

  std::uint32_t m_;
  double eps_;
  int horizon_;
};

inline ModelParams make_params(long long M, double epsilon, long long horizon) {
  if (M < 2 || M > 0x7fffffffLL) throw InvalidParam("M must be in [2, 2^31), got " + std::to_string(M));
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw InvalidParam("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  if (horizon < 1 || horizon > 0x7fffffffLL)
    throw InvalidParam("horizon must be >= 1, got " + std::to_string(horizon));
  return ModelParams(static_cast<std::uint32_t>(M), epsilon, static_cast<int>(horizon));
}

inline Regime regime(const ModelParams& params) noexcept {
  const double me = params.branching_factor();
  if (me < 1.0 - kCriticalTolerance) return Regime::Subcritical;
  if (me > 1.0 + kCriticalTolerance) return Regime::Supercritical;
  return Regime::Critical;
}

// ============================================================================
// Oracle and candidates
// ============================================================================

struct OracleSequence {
  std::vector<Token> tokens;
  std::uint64_t instance_seed = 0;
};

/// Uniform draw from [0, M)^N, a deterministic function of (params, instance_seed).
inline OracleSequence make_oracle(const ModelParams& params, std::uint64_t instance_seed) {
  StreamEngine eng(derive_stream(instance_seed, {0x6f7261636c65ULL}));
  OracleSequence o;
  o.instance_seed = instance_seed;
  o.tokens.resize(static_cast<std::size_t>(params.horizon()));
  for (auto& tok : o.tokens) tok = static_cast<Token>(eng.below(params.M()));
  return o;
}

struct Candidate {
  std::vector<Token> tokens;
  double log_score = 0.0;
  /// First step whose token departed from the oracle; empty while oracle-aligned.
  std::optional<int> diverged_at;
  /// Hash of the token path; keys the per-query random streams.
  std::uint64_t path_key = kPathInit;

  [[nodiscard]] bool erroneous() const noexcept { return diverged_at.has_value(); }
  [[nodiscard]] int length() const noexcept { return static_cast<int>(tokens.size()); }

  [[nodiscard]] Candidate extended(Token tok, double score, bool matches_oracle) const {
    Candidate c;
    c.tokens.reserve(tokens.size() + 1);
    c.tokens.assign(tokens.begin(), tokens.end());
    c.tokens.push_back(tok);
    c.log_score = log_score + std::log(score);
    c.diverged_at = diverged_at;
    if (!c.diverged_at && !matches_oracle) c.diverged_at = length() + 1;
    c.path_key = extend_key(path_key, tok);
    return c;
  }
};

struct CandidateList {
  int step = 0;
  std::vector<Candidate> candidates;
  bool truncated = false;
  bool oracle_dropped = false;

  /// L_0: the single empty candidate with score 0.
  static CandidateList initial() {
    CandidateList l;
    l.candidates.emplace_back();
    return l;
  }

  [[nodiscard]] std::size_t size() const noexcept { return candidates.size(); }

  [[nodiscard]] std::size_t erroneous_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(candidates.begin(), candidates.end(), [](const Candidate& c) { return c.erroneous(); }));
  }
};

// ============================================================================
// Eligibility models
// ============================================================================

struct Eligibility {
  bool eligible = false;
  double score = 1.0;  // in (0, 1]
};

/// C_{t+1}(token | x, prefix): the per-step classifier consumed by extend().
/// `rng` is the trial-level source; implementations derive per-query streams
/// from it so results do not depend on query order.
template <class T>
concept EligibilityModel = requires(const T& m, const OracleSequence& o, const Candidate& c, Token tok,
                                    const ModelParams& p, RandomSource rng) {
  { m(o, c, tok, p, rng) } -> std::convertible_to<Eligibility>;
};

/// Score ranges for the final-selection extension. Draws are on (lo, hi].
struct ScorerPolicy {
  double oracle_lo = 0.5;
  double oracle_hi = 1.0;
  double error_lo = 0.0;
  double error_hi = 1.0;
};

/// True when extending `prefix` by `token` stays on the oracle sequence.
inline bool is_oracle_continuation(const OracleSequence& oracle, const Candidate& prefix, Token token) {
  return !prefix.erroneous() && static_cast<std::size_t>(prefix.length()) < oracle.tokens.size() &&
         oracle.tokens[static_cast<std::size_t>(prefix.length())] == token;
}

/// The epsilon-compatible classifier at equality, independent across queries.
struct SyntheticModel {
  ScorerPolicy scorer{};

  Eligibility operator()(const OracleSequence& oracle, const Candidate& prefix, Token token,
                         const ModelParams& params, RandomSource rng) const {
    StreamEngine eng(RandomSource{extend_key(rng.seed, rng.stream_id), extend_key(prefix.path_key, token)});
    if (is_oracle_continuation(oracle, prefix, token)) {
      return {true, scorer.oracle_hi - (scorer.oracle_hi - scorer.oracle_lo) * eng.uniform()};
    }
    const bool hit = eng.uniform() < params.epsilon();
    const double score = scorer.error_hi - (scorer.error_hi - scorer.error_lo) * eng.uniform();
    return {hit, score};
  }
};

static_assert(EligibilityModel<SyntheticModel>);

inline Eligibility synthetic_eligible(const OracleSequence& oracle, const Candidate& prefix, Token token,
                                      const ModelParams& params, RandomSource rng,
                                      const ScorerPolicy& scorer = {}) {
  return SyntheticModel{scorer}(oracle, prefix, token, params, rng);
}

}  // namespace listdec
