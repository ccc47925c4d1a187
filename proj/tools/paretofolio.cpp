#include "paretofolio/config.hpp"
#include "paretofolio/error.hpp"
#include "paretofolio/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

using namespace paretofolio;

int main(int argc, char** argv) {
  CLI::App app{"Mean-variance portfolio search with evolutionary and surrogate-assisted optimizers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string algorithm;
  bool surrogate = false;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> sets;
  std::string weights;

  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--set", sets, "override a config key, e.g. --set evolve.runs=3");
  app.add_option("--seed", seed, "seed for noise, evolution and surrogate streams");
  app.add_option("--out", out_dir, "output directory");

  auto* prepare = app.add_subcommand("prepare", "clean prices, build the forecast and pick the universe");
  auto* optimize = app.add_subcommand("optimize", "run one optimization campaign");
  optimize->add_option("--algorithm", algorithm, "nsga2|rnsga2|nsga3|unsga3");
  optimize->add_flag("--surrogate", surrogate, "surrogate-assisted variant");
  auto* backtest = app.add_subcommand("backtest", "compare optimized weights with the equal-weight baseline");
  backtest->add_option("--weights", weights, "ticker,weight CSV to test instead of campaign output");
  backtest->add_option("--algorithm", algorithm, "only this campaign");
  backtest->add_flag("--surrogate", surrogate, "with --algorithm, the surrogate-assisted campaign");
  auto* report = app.add_subcommand("report", "hypervolume table across campaigns");
  for (auto* sub : {prepare, optimize, backtest, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    KeyValues overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--set expects key=value, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!algorithm.empty()) overrides["evolve.algorithm"] = algorithm;
    if (surrogate) overrides["surrogate.enabled"] = "true";
    if (seed) {
      for (const char* key : {"evolve.seed", "noise.seed", "surrogate.seed"}) overrides[key] = std::to_string(*seed);
    }
    if (!out_dir.empty()) overrides["output.dir"] = out_dir;
    const ExperimentConfig config = load_config(config_path, overrides);

    if (prepare->parsed()) {
      const auto s = cmd_prepare(config);
      fmt::print("raw rows: {}  raw tickers: {}\n", s.raw_rows, s.raw_tickers);
      fmt::print("clean rows: {}  clean tickers: {}\n", s.clean_rows, s.clean_tickers);
      fmt::print("training periods: {}\n", s.training_periods);
      fmt::print("universe ({}):", s.universe.size());
      for (const auto& t : s.universe) fmt::print(" {}", t);
      fmt::print("\n");
    } else if (optimize->parsed()) {
      const auto r = cmd_optimize(config);
      fmt::print("{}: {} runs, final mean HV {:.6f}, mean time {:.3f} s -> {}\n",
                 campaign_label(config.run.algorithm, config.surrogate), r.runs.size(),
                 r.summary.mean.empty() ? 0.0 : r.summary.mean.back(), r.summary.mean_wall_time_seconds,
                 r.dir.string());
    } else if (backtest->parsed()) {
      std::optional<std::filesystem::path> file;
      if (!weights.empty()) file = weights;
      std::optional<std::pair<Algorithm, bool>> campaign;
      if (!algorithm.empty()) campaign = std::make_pair(config.run.algorithm, config.surrogate);
      const auto r = cmd_backtest(config, file, campaign);
      fmt::print("{:<14} {:>8} {:>10} {:>8}\n", "name", "vol %", "return %", "sharpe");
      for (const auto& row : r.rows) {
        fmt::print("{:<14} {:>8.2f} {:>10.2f} {:>8.3f}\n", row.name, row.volatility_pct, row.return_pct, row.sharpe);
      }
      fmt::print("-> {}\n", r.path.string());
    } else if (report->parsed()) {
      fmt::print("-> {}\n", cmd_report(config).string());
    }
  } catch (const Error& e) {
    fmt::print(stderr, "ERROR {}: {}\n", to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "ERROR Internal: {}\n", e.what());
    return 1;
  }
  return 0;
}
