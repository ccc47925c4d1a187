#pragma once

#include "paretofolio/backtest.hpp"
#include "paretofolio/config.hpp"
#include "paretofolio/evolve.hpp"
#include "paretofolio/market_data.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace paretofolio {

/// Files written by `prepare` and read back by the later stages.
struct PreparedData {
  PriceFrame clean;             // every cleaned date, market column included
  ReturnsFrame forecast;        // noisy asset returns over the training window
  Eigen::VectorXd market;       // market returns aligned with forecast.dates
  std::vector<std::string> universe;
};

struct PrepareSummary {
  std::size_t raw_rows = 0;
  std::size_t raw_tickers = 0;
  std::size_t clean_rows = 0;
  std::size_t clean_tickers = 0;
  std::size_t training_periods = 0;
  std::vector<std::string> universe;
};

PrepareSummary cmd_prepare(const ExperimentConfig& config);
PreparedData load_prepared(const std::filesystem::path& dir);

/// Mean-variance model of the prepared universe.
MarketModel universe_model(const PreparedData& data, const ExperimentConfig& config);

/// Output directory name of one campaign, e.g. `nsga2` or `nsga2_sa`.
std::string campaign_name(Algorithm algorithm, bool surrogate);
/// Display label, e.g. `NSGA-II` or `SA_NSGA-II`.
std::string campaign_label(Algorithm algorithm, bool surrogate);

struct OptimizeResult {
  std::filesystem::path dir;
  std::vector<OptimizerRun> runs;
  TraceSummary summary;
  Weights weights;
};

/// Runs one campaign (config.run.runs seeded runs of config.run.algorithm,
/// surrogate-assisted when config.surrogate is set) and writes its files.
OptimizeResult cmd_optimize(const ExperimentConfig& config);

/// Runs `config.run.runs` runs in parallel (bounded by config.threads or
/// PARETOFOLIO_THREADS), returning them in seed order.
std::vector<OptimizerRun> run_campaign(const Problem& problem, const ExperimentConfig& config);

/// Tangency weights warm-started from every final-front member.
Weights derive_weights(const std::vector<OptimizerRun>& runs, const MarketModel& model, const CostSpec& spec,
                       double gamma_l2);

struct BacktestResult {
  std::vector<ComparisonRow> rows;
  std::filesystem::path path;
};

/// Equal-weight baseline against a weights file, a single campaign, or
/// every campaign found in the output directory.
BacktestResult cmd_backtest(const ExperimentConfig& config, const std::optional<std::filesystem::path>& weights_file,
                            std::optional<std::pair<Algorithm, bool>> campaign);

/// Cross-campaign table with HV recomputed under shared bounds.
std::filesystem::path cmd_report(const ExperimentConfig& config);

unsigned thread_limit(const ExperimentConfig& config);

}  // namespace paretofolio
