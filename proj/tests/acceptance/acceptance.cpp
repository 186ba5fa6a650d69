// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Writes criterion1.csv and criterion4.csv to the working directory for the
// plotting scripts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "listdec/listdec.hpp"

using namespace listdec;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) detail << what;
      ok = false;
    }
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  write_csv(f, rows);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LISTDEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ----------------------------------------------------------------------------

Check criterion1() {
  Check c;
  const auto p = make_params(20, 0.01, 50);
  const double bound = 0.25;
  const auto e = exact_mean_trajectory(p, 50);
  for (int t = 1; t <= 50; ++t)
    c.require(e[static_cast<std::size_t>(t)] <= bound + 1e-12, "exact mean above 0.25 at t=" + std::to_string(t));
  const auto s = run_batch(p, 100000, 1001);
  double worst = -1e9;
  for (int t = 1; t <= 50; ++t) {
    const auto& st = s.steps[static_cast<std::size_t>(t)];
    worst = std::max(worst, (st.mean_R - bound) / std::max(st.se_R, 1e-300));
    c.require(st.mean_R <= bound + 4 * st.se_R, "MC mean above bound + 4SE at t=" + std::to_string(t));
  }
  write_file("criterion1.csv", rows_from_stats(Engine::Counts, p, s));
  c.detail << (c.ok ? "" : "; ") << "max exact e_t=" << e[50] << ", worst (mean-0.25)/SE=" << worst;
  return c;
}

Check criterion2() {
  Check c;
  const auto p = make_params(20, 0.01, 50);
  const double bound = 0.75;
  const auto z = exact_zero_prob_trajectory(p, 50);
  for (int t = 0; t <= 50; ++t)
    c.require(z[static_cast<std::size_t>(t)] >= bound - 1e-12, "exact P(R_t=0) below 0.75 at t=" + std::to_string(t));
  const auto s = run_batch(p, 100000, 1002);
  for (int t = 0; t <= 50; ++t) {
    const auto& st = s.steps[static_cast<std::size_t>(t)];
    c.require(st.zero_frac >= bound - 4 * st.zero_se, "zero_frac below 0.75 - 4SE at t=" + std::to_string(t));
  }
  const auto rep = accuracy_estimate(p, DecodeConfig{}, 10000, 1003);
  const double se = std::sqrt(rep.accuracy * (1 - rep.accuracy) / static_cast<double>(rep.trials));
  c.require(rep.exploded_trials == 0, "decode trials exploded");
  c.require(rep.accuracy >= bound - 4 * se, "decode accuracy below 0.75 - 4SE");
  c.detail << (c.ok ? "" : "; ") << "z_50=" << z[50] << ", zero_frac(50)=" << s.steps[50].zero_frac
           << ", decode accuracy=" << rep.accuracy << " (SE " << se << ")";
  return c;
}

Check criterion3() {
  Check c;
  const auto p = make_params(20, 0.1, 40);
  const auto e = exact_mean_trajectory(p, 40);
  for (int t = 0; t <= 40; ++t) {
    const double floor = std::pow(2.0, t) - 1.0;
    c.require(e[static_cast<std::size_t>(t)] >= floor * (1 - 1e-12), "e_t below 2^t - 1 at t=" + std::to_string(t));
  }
  for (int t = 10; t < 40; ++t) {
    const double ratio = e[static_cast<std::size_t>(t) + 1] / e[static_cast<std::size_t>(t)];
    c.require(ratio >= 1.98 && ratio <= 2.02, "growth ratio outside [1.98, 2.02] at t=" + std::to_string(t));
  }
  const auto s = run_batch(make_params(20, 0.1, 25), 10000, 1004);
  c.require(s.aborted_trials == 0, "count trials aborted");
  // least-squares slope of log2(mean_R) on t over [10, 25]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int t = 10; t <= 25; ++t) {
    const double y = std::log2(s.steps[static_cast<std::size_t>(t)].mean_R);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  c.require(std::abs(slope - 1.0) <= 0.1, "log2 slope outside 1.0 +- 0.1");
  c.detail << (c.ok ? "" : "; ") << "e_40=" << e[40] << ", MC log2 slope=" << slope;
  return c;
}

SweepConfig criterion4_config() {
  SweepConfig cfg;
  cfg.M = 20;
  cfg.epsilon_grid = parse_epsilon_grid("0.005:0.095:0.005");
  cfg.horizon = 30;
  cfg.trials = 20000;
  cfg.seed = 4;
  cfg.engine = Engine::Counts;
  return cfg;
}

Check criterion4() {
  Check c;
  const auto cfg = criterion4_config();
  c.require(cfg.epsilon_grid.size() == 19, "grid does not have 19 points");
  const auto rows = run_sweep(cfg).rows;
  int sub = 0, super = 0;
  double min_ratio = 1e300;
  for (const auto& r : rows) {
    if (r.t != 30) continue;
    const double se = r.mean_ci95 / kZ95;
    if (r.m_eps <= 0.9 + 1e-9) {
      ++sub;
      c.require(r.mean_R <= r.m_eps / (1 - r.m_eps) + 4 * se,
                "mean_R above m/(1-m) + 4SE at m_eps=" + format_real(r.m_eps));
    }
    if (r.m_eps >= 1.2 - 1e-9) {
      ++super;
      const double target = std::pow(r.m_eps, 30) / 10;
      min_ratio = std::min(min_ratio, r.mean_R / target);
      c.require(r.mean_R >= target, "mean_R below (m_eps)^30/10 at m_eps=" + format_real(r.m_eps));
    }
  }
  c.require(sub == 9 && super == 8, "unexpected number of grid points in each regime");
  std::ostringstream a, b;
  write_csv(a, rows);
  write_csv(b, run_sweep(cfg).rows);
  c.require(a.str() == b.str(), "CSV differs between runs");
  std::ofstream("criterion4.csv", std::ios::binary | std::ios::trunc) << a.str();
  c.detail << (c.ok ? "" : "; ") << sub << " subcritical / " << super
           << " supercritical points, min mean_R/((m)^30/10)=" << min_ratio;
  return c;
}

Check criterion5() {
  Check c;
  const auto p = make_params(2, 0.3, 2);
  const auto bf = brute_force_distribution(p, 2);
  const auto e = exact_mean_trajectory(p, 2);
  const auto z = exact_zero_prob_trajectory(p, 2);
  const double bf_mean = distribution_mean(bf[2]);
  const double bf_zero = distribution_mass(bf[2], 0);
  c.require(std::abs(bf_mean - 0.48) <= 1e-12, "brute-force E[R_2] != 0.48");
  c.require(std::abs(e[2] - 0.48) <= 1e-12, "recursion E[R_2] != 0.48");
  c.require(std::abs(bf_zero - 0.5929) <= 1e-12, "brute-force P(R_2=0) != 0.5929");
  c.require(std::abs(z[2] - 0.5929) <= 1e-12, "PGF P(R_2=0) != 0.5929");

  const auto counts = run_batch(p, 1000000, 1005);
  const auto& cs = counts.steps[2];
  c.require(std::abs(cs.mean_R - 0.48) <= 4 * cs.se_R, "count engine E[R_2] off by > 4SE");
  c.require(std::abs(cs.zero_frac - 0.5929) <= 4 * cs.zero_se, "count engine zero_frac off by > 4SE");

  const auto dec = accuracy_estimate(p, DecodeConfig{}, 100000, 1006);
  const auto& ds = dec.stats.steps[2];
  c.require(std::abs(ds.mean_R - 0.48) <= 4 * ds.se_R, "decode engine E[R_2] off by > 4SE");
  c.require(std::abs(ds.zero_frac - 0.5929) <= 4 * ds.zero_se, "decode engine zero_frac off by > 4SE");
  c.detail << (c.ok ? "" : "; ") << "counts mean=" << cs.mean_R << " zero=" << cs.zero_frac
           << ", decode mean=" << ds.mean_R << " zero=" << ds.zero_frac;
  return c;
}

Check criterion6() {
  Check c;
  const auto p = make_params(5, 0.05, 10);
  const double exact = exact_mean_trajectory(p, 10)[10];
  c.require(std::abs(exact - 0.2666664123535156) <= 1e-12, "exact e_10 mismatch");
  // ten batches of 10^4; dominance must hold in each, the mean is pooled
  MomentAccumulator pooled;
  int dominance_failures = 0;
  for (std::uint64_t b = 0; b < 10; ++b) {
    const auto rep = accuracy_estimate(p, DecodeConfig{}, 10000, 2000 + b);
    c.require(rep.exploded_trials == 0, "decode trials exploded");
    if (rep.accuracy < rep.zero_frac_final) ++dominance_failures;
    MomentAccumulator batch;
    const auto& st = rep.stats.steps[10];
    batch.n = st.trials;
    batch.mean = st.mean_R;
    batch.m2 = st.variance_R * static_cast<double>(st.trials - 1);
    pooled.merge(batch);
  }
  c.require(dominance_failures == 0, "accuracy < zero_frac_final in some batch");
  const double se = pooled.standard_error();
  c.require(std::abs(pooled.mean - exact) <= 4 * se, "decode E[R_10] off by > 4SE");
  c.detail << (c.ok ? "" : "; ") << "decode E[R_10]=" << pooled.mean << " vs " << exact << " (SE " << se << ")";
  return c;
}

Check criterion7() {
  Check c;
  // library: 1 worker vs many
  auto cfg = criterion4_config();
  cfg.trials = 5000;
  std::ostringstream one, many;
  write_csv(one, run_sweep(cfg, 1).rows);
  write_csv(many, run_sweep(cfg, 8).rows);
  c.require(one.str() == many.str(), "library CSV differs between 1 and 8 workers");

  // CLI: two runs, and 1 vs many workers
  const std::string args = "sweep --M 20 --eps-grid 0.005:0.095:0.005 --t 30 --trials 5000 --seed 4 --engine counts";
  c.require(run_cli(args + " --workers 1 --out sweep_run1.csv") == 0, "CLI run 1 failed");
  c.require(run_cli(args + " --workers 1 --out sweep_run2.csv") == 0, "CLI run 2 failed");
  c.require(run_cli(args + " --workers 8 --out sweep_run3.csv") == 0, "CLI run 3 failed");
  const auto r1 = slurp("sweep_run1.csv"), r2 = slurp("sweep_run2.csv"), r3 = slurp("sweep_run3.csv");
  c.require(!r1.empty(), "CLI CSV empty");
  c.require(r1 == r2, "CLI CSV differs across runs");
  c.require(r1 == r3, "CLI CSV differs between 1 and 8 workers");
  c.require(r1 == one.str(), "CLI CSV differs from library CSV");

  const std::string dargs = "sweep --M 5 --eps-grid 0.02,0.05 --t 10 --trials 2000 --seed 7 --engine decode";
  c.require(run_cli(dargs + " --workers 1 --out sweep_dec1.csv") == 0, "CLI decode run 1 failed");
  c.require(run_cli(dargs + " --workers 8 --out sweep_dec2.csv") == 0, "CLI decode run 2 failed");
  c.require(slurp("sweep_dec1.csv") == slurp("sweep_dec2.csv"), "decode-engine CSV differs across worker counts");
  c.detail << (c.ok ? "" : "; ") << r1.size() << " bytes identical across runs and worker counts";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 Uniform mean bound (M=20, eps=0.01)", 10, criterion1},
      {"2 Accuracy lower bound 0.75 (M=20, eps=0.01)", 60, criterion2},
      {"3 Supercritical explosion (M=20, eps=0.1)", 10, criterion3},
      {"4 Phase diagram across M*eps=1 (M=20, t=30)", 60, criterion4},
      {"5 Brute-force oracle equivalence (M=2, eps=0.3)", 30, criterion5},
      {"6 Engine cross-validation (M=5, eps=0.05, N=10)", 30, criterion6},
      {"7 Sweep CSV determinism", 120, criterion7},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!result.ok) ++failed;
    std::printf("[%s] %-50s %7.2fs (budget %gs)  %s\n", result.ok ? "PASS" : "FAIL", cr.name, secs, cr.budget_s,
                result.detail.str().c_str());
    if (secs > cr.budget_s) std::printf("       note: runtime exceeded the stated budget\n");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
