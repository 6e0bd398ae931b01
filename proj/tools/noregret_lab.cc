// Copyright 2026 The noregret-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// noregret_lab: command-line front end for simulations, probes, pmf tools and
// the acceptance suite.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "noregret/acceptance.h"
#include "noregret/csv.h"
#include "noregret/dynamics.h"
#include "noregret/ensemble.h"
#include "noregret/experiment_config.h"
#include "noregret/pmf.h"
#include "noregret/probes.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace noregret {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> assignments;
  int workers = -1;
  std::string out;
};

// Collects output files and writes the manifest at the end.
class OutputSet {
 public:
  OutputSet(std::string subcommand, const ExperimentConfig& config,
            fs::path dir)
      : subcommand_(std::move(subcommand)),
        config_(config),
        dir_(std::move(dir)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
  }

  void Write(const std::string& name,
             const std::function<void(std::ostream&)>& write) {
    WriteFile((dir_ / name).string(), write);
    files_.push_back(name);
  }

  void WriteJson(const std::string& name, const json& j) {
    Write(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  }

  void Finish() {
    RunManifest m;
    m.subcommand = subcommand_;
    m.config = config_.ToJson();
    m.config_hash = config_.Hash();
    m.tool_version = std::string(Version());
    m.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
    m.outputs = files_;
    WriteFile((dir_ / "manifest.json").string(),
              [&](std::ostream& out) { out << m.ToJson().dump(2) << '\n'; });
    std::cout << "wrote " << files_.size() << " file(s) and manifest.json to "
              << dir_.string() << '\n';
  }

 private:
  std::string subcommand_;
  const ExperimentConfig& config_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> files_;
};

ExperimentConfig LoadConfig(const CommonOptions& opts) {
  ExperimentConfig config = opts.config_path.empty()
                                ? ExperimentConfig()
                                : ExperimentConfig::Load(opts.config_path);
  for (const auto& a : opts.assignments) config.SetAssignment(a);
  if (opts.workers >= 0) config.Set("workers", std::to_string(opts.workers));
  if (!opts.out.empty()) config.Set("output_dir", opts.out);
  return config;
}

int Workers(const ExperimentConfig& config) {
  const int w = config.workers();
  return w > 0 ? w : DefaultWorkers();
}

fs::path OutputDir(const ExperimentConfig& config, const std::string& sub) {
  if (!config.Get("output_dir").empty()) return config.Get("output_dir");
  if (const char* env = std::getenv("NOREGRET_LAB_OUT"); env && *env) {
    return fs::path(env) / sub;
  }
  return fs::path("noregret_out") / sub;
}

Equilibrium RequireEquilibrium(const Game2x2& game) {
  try {
    return NashEquilibrium(game);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("this probe needs a competitive game: ") +
                      e.what());
  }
}

int Simulate(const ExperimentConfig& config) {
  const RunConfig rc = config.ToRunConfig();
  const std::int64_t n_runs = config.GetInt("n_runs");
  const auto trajectories =
      MonteCarlo(rc, n_runs, config.seed(), Workers(config));
  OutputSet out("simulate", config, OutputDir(config, "simulate"));
  json summary = json::array();
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const Trajectory& traj = trajectories[k];
    json s = {{"replica", k},
              {"seed", traj.seed},
              {"steps", traj.steps},
              {"final_p", traj.Final().p_t},
              {"final_q", traj.Final().q_t},
              {"q_bar", traj.Final().q_bar},
              {"q_hat", traj.Final().q_hat}};
    if (traj.neighborhood_center) {
      s["neighborhood_fraction"] =
          NeighborhoodFraction(traj, *traj.neighborhood_center);
    }
    summary.push_back(s);
  }
  if (n_runs == 1) {
    out.Write("trajectory.csv", [&](std::ostream& os) {
      WriteTrajectoryCsv(os, trajectories[0]);
    });
    if (!trajectories[0].tail.empty()) {
      out.Write("tail.csv",
                [&](std::ostream& os) { WriteTailCsv(os, trajectories[0]); });
    }
  } else {
    out.Write("ensemble.csv",
              [&](std::ostream& os) { WriteEnsembleCsv(os, trajectories); });
  }
  out.WriteJson("summary.json", summary);
  out.Finish();
  return kExitOk;
}

int ProbeSensitivity(const ExperimentConfig& config) {
  const Game2x2 game = config.game();
  RequireEquilibrium(game);
  const std::int64_t t = config.GetInt("probe_t");
  const std::int64_t s = config.GetInt("probe_s");
  const std::int64_t n = config.GetInt("samples");
  const int workers = Workers(config);
  SensitivityScan scan;
  if (s >= 0) {
    if (s >= t) throw ConfigError("probe_s must be below probe_t");
    scan.grid.push_back(SensitivityProbe(config.strategy1(), game, t, s, n,
                                         config.seed(),
                                         static_cast<int>(config.GetInt("tail_value")),
                                         workers));
  } else {
    const double alpha = config.GetReal("alpha_coeff");
    if (alpha * std::sqrt(static_cast<double>(t)) < 1.0) {
      throw ConfigError("alpha_coeff * sqrt(probe_t) must be at least 1");
    }
    scan = ScanSensitivity(config.strategy1(), game, t, alpha, n, config.seed(),
                           config.GetReal("s_grid_ratio"), workers);
  }
  OutputSet out("probe-sensitivity", config,
                OutputDir(config, "probe-sensitivity"));
  out.WriteJson("sensitivity.json", ToJson(scan));
  std::vector<std::vector<double>> rows;
  for (const auto& r : scan.grid) {
    rows.push_back({static_cast<double>(r.t), static_cast<double>(r.s),
                    r.mean_response, r.ci_halfwidth});
  }
  out.Write("sensitivity.csv", [&](std::ostream& os) {
    WriteTableCsv(os, {"t", "s", "mean_response", "ci_halfwidth"}, rows);
  });
  std::cout << "best s = " << scan.Best().s
            << ", mean response = " << scan.Best().mean_response << " +- "
            << scan.Best().ci_halfwidth << '\n';
  out.Finish();
  return kExitOk;
}

int ProbeOscillation(const ExperimentConfig& config) {
  RunConfig rc = config.ToRunConfig();
  const double p_star = RequireEquilibrium(rc.game).p_star;
  const double delta = config.GetReal("delta");
  if (!(delta < std::min(p_star, 1.0 - p_star))) {
    throw ConfigError("delta must lie in (0, min(p*, 1 - p*))");
  }
  const auto checkpoints = rc.options.schedule.Points(rc.steps);
  const OscillationReport report = OscillationEstimate(
      rc, p_star, delta, checkpoints, config.GetInt("n_runs"), config.seed(),
      Workers(config));
  OutputSet out("probe-oscillation", config,
                OutputDir(config, "probe-oscillation"));
  out.WriteJson("oscillation.json", ToJson(report));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    rows.push_back({static_cast<double>(checkpoints[k]),
                    report.fraction_deviating[k]});
  }
  out.Write("oscillation.csv", [&](std::ostream& os) {
    WriteTableCsv(os, {"t", "fraction_deviating"}, rows);
  });
  std::cout << "fraction deviating at t = " << checkpoints.back() << ": "
            << report.fraction_deviating.back() << '\n';
  out.Finish();
  return kExitOk;
}

int AuditRegret(const ExperimentConfig& config) {
  RunConfig rc = config.ToRunConfig();
  if (rc.mode != FeedbackMode::kRealization) {
    throw ConfigError("audit-regret needs mode = realization");
  }
  rc.options.tail_window = rc.steps;
  const bool audit_two = rc.spec2.has_value();
  const auto reports = MonteCarloMap(
      rc, config.GetInt("n_runs"), config.seed(), Workers(config),
      [audit_two](const Trajectory& traj) {
        std::vector<RegretReport> r{RealizedRegret(traj, Player::kOne)};
        if (audit_two) r.push_back(RealizedRegret(traj, Player::kTwo));
        return r;
      });
  OutputSet out("audit-regret", config, OutputDir(config, "audit-regret"));
  json j = json::array();
  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    for (std::size_t p = 0; p < reports[k].size(); ++p) {
      const RegretReport& r = reports[k][p];
      json e = ToJson(r);
      e["replica"] = k;
      e["player"] = p + 1;
      j.push_back(e);
      rows.push_back({static_cast<double>(k), static_cast<double>(p + 1),
                      r.regret, r.normalized, r.max_normalized});
      worst = std::max(worst, r.max_normalized);
    }
  }
  out.WriteJson("regret.json", j);
  out.Write("regret.csv", [&](std::ostream& os) {
    WriteTableCsv(os, {"replica", "player", "regret", "normalized",
                       "max_normalized"},
                  rows);
  });
  std::cout << "worst prefix regret / sqrt(t): " << worst << '\n';
  out.Finish();
  return kExitOk;
}

std::vector<double> ParseQs(const std::string& text) {
  std::vector<double> qs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '/')) qs.push_back(std::stod(item));
  return qs;
}

int PmfTools(const ExperimentConfig& config) {
  const std::string tool = config.Get("pmf");
  const std::int64_t t = config.GetInt("pmf_t");
  const std::int64_t s = config.GetInt("pmf_s");
  const double q = config.GetReal("pmf_q");
  const double delta = config.GetReal("pmf_delta");
  const double window = config.GetReal("window");
  OutputSet out("pmf-tools", config, OutputDir(config, "pmf-tools"));
  const auto write_pmf = [&](const Pmf& pmf) {
    out.Write("pmf.csv", [&](std::ostream& os) { pmf.WriteCsv(os); });
    std::cout << "mean " << pmf.Mean() << ", support " << pmf.support_offset()
              << ".." << pmf.support_max() << '\n';
  };
  try {
    if (tool == "binomial") {
      write_pmf(BinomialPmf(t, q));
    } else if (tool == "poisson-binomial") {
      const std::vector<double> qs = ParseQs(config.Get("pmf_qs"));
      write_pmf(PoissonBinomialPmf(qs));
    } else if (tool == "shifted") {
      write_pmf(ShiftedBinomialPmf(t, s, q));
    } else if (tool == "mixture") {
      write_pmf(MixtureBinomialPmf(config.GetInt("pmf_n"), t, q, delta));
    } else if (tool == "demoivre") {
      const double cert = DeMoivreRatioCertificate(t, q, window);
      out.WriteJson("demoivre.json", {{"t", t}, {"q", q}, {"window", window},
                                      {"max_relative_deviation", cert}});
      std::cout << "max relative deviation " << cert << '\n';
    } else if (tool == "shift-ratio") {
      const ShiftRatioCheck c = ShiftRatioBoundCheck(t, s, q, window);
      out.WriteJson("shift_ratio.json",
                    {{"t", t}, {"s", s}, {"q", q}, {"window", window},
                     {"measured", c.measured}, {"analytic", c.analytic},
                     {"exponential", c.exponential}, {"z_low", c.z_low},
                     {"z_high", c.z_high}, {"holds", c.Holds()},
                     {"holds_exponential", c.HoldsExponential()}});
      std::cout << "measured " << c.measured << " vs (1+b0)^-a " << c.analytic
                << " vs exp(-a b0) " << c.exponential << '\n';
    } else {
      const int levels = static_cast<int>(config.GetInt("grid_levels"));
      const std::int64_t z = config.GetInt("pmf_z");
      if (t > 8) throw ConfigError("extremizer needs pmf_t <= 8");
      const auto all = ExtremizerScan(static_cast<int>(t), q, delta, levels);
      json j = json::array();
      for (std::size_t k = 0; k < all.size(); ++k) {
        if (z >= 0 && static_cast<std::int64_t>(k) != z) continue;
        j.push_back({{"z", k},
                     {"min_mass", all[k].min_mass},
                     {"minimizers", all[k].minimizers},
                     {"three_point_structure", all[k].three_point_structure}});
      }
      out.WriteJson("extremizer.json", j);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  out.Finish();
  return kExitOk;
}

int ProbeMclt(const ExperimentConfig& config) {
  const RunConfig rc = config.ToRunConfig();
  const std::int64_t n = config.GetInt("n_runs");
  if (n < 50) throw ConfigError("probe-mclt needs n_runs >= 50");
  const MartingaleCheckReport r =
      MartingaleCheck(rc, rc.steps, n, config.seed(), config.normalization(),
                      Workers(config));
  OutputSet out("probe-mclt", config, OutputDir(config, "probe-mclt"));
  out.WriteJson("mclt.json", ToJson(r));
  if (r.degenerate) {
    std::cout << "degenerate normalisation (zero variance)\n";
  } else {
    std::cout << "KS distance " << r.ks_statistic << '\n';
  }
  out.Finish();
  return kExitOk;
}

int ProbeStationarity(const ExperimentConfig& config) {
  const Game2x2 game = config.game();
  const double q_star = RequireEquilibrium(game).q_star;
  const StationarityReport r = StationarityCheck(
      game, config.strategy1(), q_star, config.GetInt("steps"),
      std::max<std::int64_t>(config.GetInt("n_runs"), 2), config.seed(),
      Workers(config));
  OutputSet out("probe-stationarity", config,
                OutputDir(config, "probe-stationarity"));
  out.WriteJson("stationarity.json", ToJson(r));
  std::cout << "payoff/t " << r.mean_payoff_rate << " (R* " << r.r_star
            << "), Z/t " << r.mean_z_rate << " (q* " << r.q_star << ")\n";
  out.Finish();
  return kExitOk;
}

int ProbeTimeAverage(const ExperimentConfig& config) {
  const RunConfig rc = config.ToRunConfig();
  const double q_star = RequireEquilibrium(rc.game).q_star;
  const double rate = config.GetReal("rate_exponent");
  const auto series = MonteCarloMap(
      rc, config.GetInt("n_runs"), config.seed(), Workers(config),
      [&](const Trajectory& traj) {
        return TimeAverageDeviation(traj, q_star, rate);
      });
  OutputSet out("probe-time-average", config,
                OutputDir(config, "probe-time-average"));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < series.size(); ++k) {
    for (const auto& d : series[k]) {
      rows.push_back({static_cast<double>(k), static_cast<double>(d.t), d.value});
    }
  }
  out.Write("time_average.csv", [&](std::ostream& os) {
    WriteTableCsv(os, {"replica", "t", "scaled_deviation"}, rows);
  });
  out.Finish();
  return kExitOk;
}

int ProbeShakyHands(const ExperimentConfig& config) {
  const RunConfig rc = config.ToRunConfig();
  const double q_star = RequireEquilibrium(rc.game).q_star;
  ShakyHandsReport r;
  try {
    r = ShakyHandsEstimate(rc, q_star, config.GetReal("gamma"),
                           config.GetInt("n_runs"), config.seed(),
                           Workers(config));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  OutputSet out("probe-shaky-hands", config,
                OutputDir(config, "probe-shaky-hands"));
  out.WriteJson("shaky_hands.json", ToJson(r));
  out.Write("empirical_pmf.csv",
            [&](std::ostream& os) { r.empirical.WriteCsv(os); });
  std::cout << "min ratio vs Poisson-binomial "
            << r.vs_poisson_binomial.window.min_ratio << ", vs binomial "
            << r.vs_binomial.window.min_ratio << '\n';
  out.Finish();
  return kExitOk;
}

int CheckAll(const ExperimentConfig& config, bool full,
             const std::vector<int>& only) {
  const int workers = Workers(config);
  std::vector<CriterionResult> results;
  const auto report = [](const CriterionResult& r) {
    std::cout << FormatResultLine(r) << std::endl;
  };
  if (only.empty()) {
    results = RunAcceptance(full ? Tier::kFull : Tier::kFast, workers, report);
  } else {
    for (int id : only) {
      if (id < 1 || id > kCriterionCount) {
        throw ConfigError("criterion ids run from 1 to " +
                          std::to_string(kCriterionCount));
      }
      results.push_back(RunCriterion(id, workers));
      report(results.back());
    }
  }
  int passed = 0;
  json j = json::array();
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                 {"detail", r.detail}, {"seconds", r.seconds}});
  }
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  OutputSet out("check-all", config, OutputDir(config, "check-all"));
  out.WriteJson("acceptance.json", j);
  out.Finish();
  return passed == static_cast<int>(results.size()) ? kExitOk
                                                     : kExitAcceptance;
}

}  // namespace
}  // namespace noregret

int main(int argc, char** argv) {
  using namespace noregret;
  CLI::App app{"noregret_lab: repeated 2x2 games under no-regret learning"};
  app.set_version_flag("--version", std::string(Version()));
  app.require_subcommand(1);

  CommonOptions common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config_path,
                    "key = value config file");
    sub->add_option("--set", common.assignments,
                    "override a config key (key=value); repeatable");
    sub->add_option("-j,--workers", common.workers,
                    "worker threads (0: all hardware threads)");
    sub->add_option("-o,--out", common.out,
                    "output directory (default: $NOREGRET_LAB_OUT/<cmd>)");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const ExperimentConfig&);
  };
  const Command commands[] = {
      {"simulate", "run one trajectory or an ensemble", Simulate},
      {"probe-sensitivity", "response to an engineered tail of ones",
       ProbeSensitivity},
      {"probe-oscillation", "fraction of replicas away from equilibrium",
       ProbeOscillation},
      {"audit-regret", "realised regret over full-resolution play",
       AuditRegret},
      {"pmf-tools", "exact pmfs, certificates and the extremizer oracle",
       PmfTools},
      {"probe-mclt", "Kolmogorov-Smirnov check of the normalised sums",
       ProbeMclt},
      {"probe-stationarity", "payoff and count means against i.i.d. play",
       ProbeStationarity},
      {"probe-time-average", "scaled time-average deviation series",
       ProbeTimeAverage},
      {"probe-shaky-hands", "count histogram against independent models",
       ProbeShakyHands},
  };
  std::vector<std::pair<CLI::App*, int (*)(const ExperimentConfig&)>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, c.fn);
  }
  CLI::App* check = app.add_subcommand("check-all", "run the acceptance suite");
  add_common(check);
  bool full = false;
  std::vector<int> only;
  check->add_flag("--full", full, "include the 10^6-step ensembles");
  check->add_option("--criteria", only, "run only these criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const ExperimentConfig config = LoadConfig(common);
    if (check->parsed()) return CheckAll(config, full, only);
    for (const auto& [sub, fn] : subs) {
      if (sub->parsed()) return fn(config);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
