// listdec: bounds, Monte Carlo batches, and epsilon sweeps for the list-decoding
// error-branching model.
//
// Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "listdec/listdec.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  long long M = 20;
  double eps = 0.01;
  long long t = 50;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::string out;
  bool json = false;
  unsigned workers = 0;
  std::optional<std::size_t> cap;
  std::string scorer = "uniform";
  std::string grid;
  std::string engine = "counts";
};

void emit(const Options& o, const std::vector<listdec::SweepRow>& rows) {
  auto write = [&](std::ostream& os) {
    if (o.json)
      listdec::write_json(os, rows);
    else
      listdec::write_csv(os, rows);
  };
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f) throw RuntimeFailure("cannot open '" + o.out + "' for writing");
  write(f);
  f.flush();
  if (!f) throw RuntimeFailure("write to '" + o.out + "' failed");
}

void check_all_aborted(const listdec::SummaryStats& s) {
  if (s.trials > 0 && s.aborted_trials == s.trials) throw RuntimeFailure("every trial aborted");
}

listdec::DecodeConfig decode_config(const Options& o) {
  if (o.scorer != "uniform") throw listdec::InvalidParam("unknown scorer '" + o.scorer + "'");
  listdec::DecodeConfig c;
  c.cap = o.cap;
  return c;
}

void status_line(const listdec::AccuracyReport& r) {
  std::cerr << "accuracy=" << listdec::format_real(r.accuracy) << " ci95=" << listdec::format_real(r.ci95)
            << " zero_frac_final=" << listdec::format_real(r.zero_frac_final) << " trials=" << r.trials
            << " exploded=" << r.exploded_trials << " truncated=" << r.truncated_trials
            << " oracle_dropped=" << r.oracle_dropped_trials << " extinct=" << r.extinct_trials << '\n';
}

void add_common(CLI::App* cmd, Options& o, bool with_trials) {
  cmd->add_option("--M", o.M, "token space size")->required();
  cmd->add_option("--t", o.t, "horizon (number of steps)")->required();
  if (with_trials) {
    cmd->add_option("--trials", o.trials, "Monte Carlo trials")->required();
    cmd->add_option("--seed", o.seed, "base seed")->required();
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores); output does not depend on it");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"List-decoding error branching: bounds, simulation, sweeps"};
  app.set_config("--config", "", "configuration file (keys mirror the flags; flags override)");
  app.require_subcommand(1);
  Options o;

  auto* bounds = app.add_subcommand("bounds", "analytic bounds and exact references");
  add_common(bounds, o, false);
  bounds->add_option("--eps", o.eps, "false-alarm probability")->required();
  bounds->add_flag("--json", o.json, "emit JSON");

  auto* simulate = app.add_subcommand("simulate", "aggregate count-engine batch");
  add_common(simulate, o, true);
  simulate->add_option("--eps", o.eps, "false-alarm probability")->required();
  simulate->add_option("--out", o.out, "output path (default stdout)");
  simulate->add_flag("--json", o.json, "emit JSON");

  auto* decode = app.add_subcommand("decode", "explicit list-decoder batch");
  add_common(decode, o, true);
  decode->add_option("--eps", o.eps, "false-alarm probability")->required();
  decode->add_option("--cap", o.cap, "maximum list size")->check(CLI::PositiveNumber);
  decode->add_option("--scorer", o.scorer, "scorer policy")->check(CLI::IsMember({"uniform"}));
  decode->add_option("--out", o.out, "output path (default stdout)");
  decode->add_flag("--json", o.json, "emit JSON");

  auto* sweep = app.add_subcommand("sweep", "epsilon sweep across the critical point");
  add_common(sweep, o, true);
  sweep->add_option("--eps-grid", o.grid, "start:stop:step or comma list")->required();
  sweep->add_option("--engine", o.engine, "counts | decode")->check(CLI::IsMember({"counts", "decode"}));
  sweep->add_option("--cap", o.cap, "maximum list size (decode engine)")->check(CLI::PositiveNumber);
  sweep->add_option("--scorer", o.scorer, "scorer policy")->check(CLI::IsMember({"uniform"}));
  sweep->add_option("--out", o.out, "output path")->required();
  sweep->add_flag("--json", o.json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*bounds) {
      const auto b = listdec::print_bounds(o.M, o.eps, o.t);
      if (o.json)
        std::cout << listdec::bounds_to_json(b).dump(2) << '\n';
      else
        std::cout << listdec::bounds_to_text(b);
    } else if (*simulate) {
      const auto params = listdec::make_params(o.M, o.eps, o.t);
      const auto stats = listdec::run_batch(params, o.trials, o.seed, o.workers);
      check_all_aborted(stats);
      emit(o, listdec::rows_from_stats(listdec::Engine::Counts, params, stats));
    } else if (*decode) {
      const auto params = listdec::make_params(o.M, o.eps, o.t);
      const auto rep = listdec::accuracy_estimate(params, decode_config(o), o.trials, o.seed, o.workers);
      status_line(rep);
      check_all_aborted(rep.stats);
      emit(o, listdec::rows_from_stats(listdec::Engine::Decode, params, rep.stats));
    } else if (*sweep) {
      listdec::SweepConfig cfg;
      cfg.M = o.M;
      cfg.epsilon_grid = listdec::parse_epsilon_grid(o.grid);
      cfg.horizon = o.t;
      cfg.trials = o.trials;
      cfg.seed = o.seed;
      cfg.engine = o.engine == "decode" ? listdec::Engine::Decode : listdec::Engine::Counts;
      if (cfg.engine == listdec::Engine::Decode) cfg.decode = decode_config(o);
      const auto result = listdec::run_sweep(cfg, o.workers);
      emit(o, result.rows);
      std::cerr << "sweep: " << cfg.epsilon_grid.size() << " grid points, " << result.rows.size()
                << " rows -> " << o.out << '\n';
    }
  } catch (const listdec::InvalidParam& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
