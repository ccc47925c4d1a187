#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paretofolio {

/// Calendar date parsed from `YYYY-MM-DD`.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Dated per-asset adjusted close prices. Missing cells are NaN until
/// `clean` removes them.
struct PriceFrame {
  std::vector<Date> dates;
  std::vector<std::string> tickers;
  Eigen::MatrixXd prices;  // dates x tickers

  Eigen::Index rows() const { return prices.rows(); }
  Eigen::Index cols() const { return prices.cols(); }

  std::optional<Eigen::Index> column(std::string_view ticker) const;
  /// Keeps only `names`, in that order. Throws MissingTicker.
  PriceFrame select(const std::vector<std::string>& names) const;
  /// Rows with first <= date <= last.
  PriceFrame window(std::optional<Date> first, std::optional<Date> last) const;
};

/// Simple per-period returns; `dates[t]` is the end of period t.
struct ReturnsFrame {
  std::vector<Date> dates;
  std::vector<std::string> tickers;
  Eigen::MatrixXd returns;  // periods x tickers

  std::optional<Eigen::Index> column(std::string_view ticker) const;
  ReturnsFrame select(const std::vector<std::string>& names) const;
};

struct MarketModel {
  Eigen::VectorXd mu;     // per period
  Eigen::MatrixXd sigma;  // per period^2
  double shrinkage_alpha = 0.0;
  double rf = 0.0;  // per period

  Eigen::Index size() const { return mu.size(); }
};

enum class NoiseTarget { Returns, Prices };

struct NoiseSpec {
  double mean = 0.0;
  double std_dev = 0.1;
  std::uint64_t seed = 0;
  NoiseTarget target = NoiseTarget::Returns;
};

struct CsvSchema {
  std::string date_column = "date";
  /// Empty means every non-date column.
  std::vector<std::string> tickers;
  /// Keep the first occurrence of a repeated date instead of failing.
  bool dedup = false;
};

PriceFrame load_prices(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Sorts by date, drops repeated dates (first wins), drops tickers with more
/// than half of their cells missing, then drops every row with a missing
/// cell. Non-positive prices count as missing.
PriceFrame clean(const PriceFrame& frame);

ReturnsFrame simple_returns(const PriceFrame& frame);

/// Sample betas (denominator n-1) of each asset column against the market.
Eigen::VectorXd capm_betas(const ReturnsFrame& asset_returns,
                           const Eigen::Ref<const Eigen::VectorXd>& market_returns);

/// R_i = rf + beta_i (mean(r_m) - rf), all per period.
Eigen::VectorXd capm_expected_returns(const ReturnsFrame& asset_returns,
                                      const Eigen::Ref<const Eigen::VectorXd>& market_returns,
                                      double rf);

enum class ShrinkageTarget { ScaledIdentity, ConstantCorrelation };

struct ShrinkageOptions {
  ShrinkageTarget target = ShrinkageTarget::ScaledIdentity;
  /// Forces the intensity instead of estimating it.
  std::optional<double> alpha_override;
};

struct ShrinkageResult {
  Eigen::MatrixXd sigma;   // alpha F + (1 - alpha) S
  double alpha = 0.0;
  Eigen::MatrixXd sample;  // S, denominator n
  Eigen::MatrixXd target;  // F
};

ShrinkageResult ledoit_wolf_covariance(const Eigen::Ref<const Eigen::MatrixXd>& returns,
                                       const ShrinkageOptions& options = {});
ShrinkageResult ledoit_wolf_covariance(const ReturnsFrame& returns,
                                       const ShrinkageOptions& options = {});

ReturnsFrame add_forecast_noise(const ReturnsFrame& returns, const NoiseSpec& spec);
/// Price-level variant kept for `noise.target = prices`; cells that would
/// turn non-positive become missing and are removed by `clean`.
PriceFrame add_price_noise(const PriceFrame& prices, const NoiseSpec& spec);

/// The k tickers with the largest expected return, in descending order.
/// Equal values are ordered lexicographically by ticker.
std::vector<std::string> select_top_k(const Eigen::Ref<const Eigen::VectorXd>& mu,
                                      const std::vector<std::string>& tickers,
                                      std::size_t k);

/// Builds mu (CAPM) and sigma (Ledoit-Wolf) for one universe.
MarketModel build_market_model(const ReturnsFrame& asset_returns,
                               const Eigen::Ref<const Eigen::VectorXd>& market_returns,
                               double rf_per_period,
                               const ShrinkageOptions& shrinkage = {});

}  // namespace paretofolio
