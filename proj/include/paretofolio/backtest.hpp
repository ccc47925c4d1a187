#pragma once

#include "paretofolio/market_data.hpp"
#include "paretofolio/portfolio.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace paretofolio {

struct BacktestSpec {
  std::vector<std::string> tickers;
  Weights weights;
  Date start;
  Date end;
  /// 0 holds the initial weights and lets them drift; k > 0 resets every k periods.
  int rebalance_every = 0;
  double rf_annual = 0.02;
  double trading_days = 252.0;
  /// Annotation only.
  std::optional<double> target_return;
  std::optional<double> target_variance;
};

struct BacktestReport {
  double annual_volatility = 0.0;       // percent
  double expected_annual_return = 0.0;  // percent
  double sharpe = 0.0;
  Eigen::VectorXd daily_series;
  Date start;
  Date end;
  double rf_annual = 0.0;
};

/// Annualizes a per-period return series: mean * days, sample std * sqrt(days).
/// Throws ZeroVolatility when the series has no dispersion.
BacktestReport summarize_returns(const Eigen::Ref<const Eigen::VectorXd>& series, double rf_annual,
                                 double trading_days);

BacktestReport run_backtest(const PriceFrame& prices, const BacktestSpec& spec);

struct NamedReport {
  std::string name;
  BacktestReport report;
  std::optional<double> time_sec;
};

struct ComparisonRow {
  std::string name;
  double volatility_pct = 0.0;
  double return_pct = 0.0;
  double sharpe = 0.0;
  std::optional<double> time_sec;
};

/// Rows for the baseline and every candidate, by Sharpe descending; equal
/// Sharpe keeps input order. Throws WindowMismatch.
std::vector<ComparisonRow> compare_backtests(const NamedReport& baseline, const std::vector<NamedReport>& candidates);

/// `name,annual_volatility_pct,expected_annual_return_pct,sharpe,time_sec`
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace paretofolio
