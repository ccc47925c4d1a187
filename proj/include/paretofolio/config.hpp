#pragma once

#include "paretofolio/evolve.hpp"
#include "paretofolio/indicators.hpp"
#include "paretofolio/market_data.hpp"
#include "paretofolio/portfolio.hpp"
#include "paretofolio/surrogate.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace paretofolio {

/// Flat `key = value` settings with dotted keys; `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text, const std::string& origin = "<string>");
KeyValues read_key_values(const std::filesystem::path& path);

enum class RiskAxis { Variance, Volatility };

struct ExperimentConfig {
  std::filesystem::path prices_path;
  std::string market_column = "MKT";
  bool dedup = false;
  std::optional<Date> train_end;
  double periods_per_year = 252.0;

  std::size_t universe_k = 10;
  NoiseSpec noise;
  double rf_annual = 0.02;
  ShrinkageOptions shrinkage;

  double gamma = 1.0;
  double gamma_t = 1.0;
  double gamma_h = 1.0;
  double trade_rate = 0.001;
  double borrow_rate = 0.0005;
  double l_max = 1.0;
  WeightMode weight_mode = WeightMode::Simplex;

  RunConfig run;
  bool surrogate = false;
  SurrogateConfig surrogate_config;
  HVConfig hv;
  RiskAxis risk_axis = RiskAxis::Variance;

  std::optional<Date> backtest_start;
  std::optional<Date> backtest_end;
  int rebalance_every = 0;
  double gamma_l2 = 0.0;

  std::filesystem::path output_dir = "out";
  /// Upper bound on concurrent runs; 0 means hardware concurrency.
  unsigned threads = 0;

  double rf_per_period() const { return rf_annual / periods_per_year; }
  CostSpec cost_spec(Eigen::Index n) const;
};

/// Applies `values` on top of `base`. Unknown keys and unparsable values
/// raise InvalidConfig. Relative data paths resolve against `base_dir`.
ExperimentConfig apply_key_values(ExperimentConfig base, const KeyValues& values,
                                  const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path, const KeyValues& overrides = {});

}  // namespace paretofolio
