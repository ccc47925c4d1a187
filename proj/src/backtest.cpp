#include "paretofolio/backtest.hpp"

#include "paretofolio/csv_io.hpp"
#include "paretofolio/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace paretofolio {

BacktestReport summarize_returns(const Eigen::Ref<const Eigen::VectorXd>& series, double rf_annual,
                                 double trading_days) {
  const Eigen::Index n = series.size();
  if (n < 2) throw Error(ErrorCode::EmptyWindow, "backtest: need at least two periods of returns");
  const double mean = series.mean();
  const double var = (series.array() - mean).square().sum() / static_cast<double>(n - 1);
  const double annual_return = mean * trading_days;
  const double annual_vol = std::sqrt(var) * std::sqrt(trading_days);
  if (!(annual_vol > 1e-12)) throw Error(ErrorCode::ZeroVolatility, "backtest: portfolio volatility is zero");
  BacktestReport report;
  report.expected_annual_return = annual_return * 100.0;
  report.annual_volatility = annual_vol * 100.0;
  report.sharpe = (annual_return - rf_annual) / annual_vol;
  report.daily_series = series;
  report.rf_annual = rf_annual;
  return report;
}

BacktestReport run_backtest(const PriceFrame& prices, const BacktestSpec& spec) {
  if (spec.tickers.size() != static_cast<std::size_t>(spec.weights.size())) {
    throw Error(ErrorCode::DimensionMismatch, "backtest: tickers and weights differ in length");
  }
  if (!(spec.start < spec.end)) throw Error(ErrorCode::EmptyWindow, "backtest: start must precede end");
  for (const auto& t : spec.tickers) {
    if (!prices.column(t)) throw Error(ErrorCode::MissingTicker, "backtest: ticker not in price frame: " + t);
  }
  const PriceFrame window = prices.select(spec.tickers).window(spec.start, spec.end);
  if (window.rows() < 3) {
    throw Error(ErrorCode::EmptyWindow,
                fmt::format("backtest: window {}..{} has {} price rows", spec.start.to_string(),
                            spec.end.to_string(), window.rows()));
  }
  if (!window.prices.allFinite() || (window.prices.array() <= 0.0).any()) {
    throw Error(ErrorCode::MalformedRow, "backtest: window contains missing or non-positive prices");
  }

  const Eigen::Index periods = window.rows() - 1;
  const Eigen::MatrixXd asset = (window.prices.bottomRows(periods).array() / window.prices.topRows(periods).array() - 1.0).matrix();
  Eigen::VectorXd series(periods);
  // Dollar positions on one unit of starting capital; the remainder is cash.
  Eigen::VectorXd positions = spec.weights;
  double cash = 1.0 - spec.weights.sum();
  for (Eigen::Index t = 0; t < periods; ++t) {
    double value = cash + positions.sum();
    if (spec.rebalance_every > 0 && t > 0 && t % spec.rebalance_every == 0) {
      positions = spec.weights * value;
      cash = (1.0 - spec.weights.sum()) * value;
    }
    if (!(value > 0.0)) throw Error(ErrorCode::ZeroVolatility, "backtest: portfolio value exhausted");
    const double pnl = positions.dot(asset.row(t).transpose());
    series(t) = pnl / value;
    positions.array() *= 1.0 + asset.row(t).transpose().array();
  }

  BacktestReport report = summarize_returns(series, spec.rf_annual, spec.trading_days);
  report.start = spec.start;
  report.end = spec.end;
  return report;
}

std::vector<ComparisonRow> compare_backtests(const NamedReport& baseline, const std::vector<NamedReport>& candidates) {
  std::vector<ComparisonRow> rows;
  auto add = [&](const NamedReport& r) {
    if (r.report.start != baseline.report.start || r.report.end != baseline.report.end ||
        r.report.rf_annual != baseline.report.rf_annual) {
      throw Error(ErrorCode::WindowMismatch, "compare_backtests: '" + r.name + "' used a different window or rf");
    }
    rows.push_back({r.name, r.report.annual_volatility, r.report.expected_annual_return, r.report.sharpe, r.time_sec});
  };
  add(baseline);
  for (const auto& c : candidates) add(c);
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) { return a.sharpe > b.sharpe; });
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "name,annual_volatility_pct,expected_annual_return_pct,sharpe,time_sec\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.name, csv::number(r.volatility_pct), csv::number(r.return_pct),
                       csv::number(r.sharpe), r.time_sec ? csv::number(*r.time_sec) : std::string("-"));
  }
  return out;
}

}  // namespace paretofolio
