#include "paretofolio/market_data.hpp"

#include "paretofolio/csv_io.hpp"
#include "paretofolio/error.hpp"
#include "paretofolio/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace paretofolio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_missing_token(std::string_view token) {
  static constexpr std::string_view kMissing[] = {"", "NA", "N/A", "NaN", "nan", "null", "NULL", "None"};
  return std::find(std::begin(kMissing), std::end(kMissing), token) != std::end(kMissing);
}

bool days_valid(int y, int m, int d) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const int limit = kDays[m - 1] + (m == 2 && leap ? 1 : 0);
  return d <= limit;
}

std::vector<std::size_t> stable_date_order(const std::vector<Date>& dates) {
  std::vector<std::size_t> order(dates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
  return order;
}

std::vector<Eigen::Index> column_indices(const std::vector<std::string>& have,
                                         const std::vector<std::string>& want) {
  std::vector<Eigen::Index> idx;
  idx.reserve(want.size());
  for (const auto& name : want) {
    const auto it = std::find(have.begin(), have.end(), name);
    if (it == have.end()) throw Error(ErrorCode::MissingTicker, "ticker not found: " + name);
    idx.push_back(static_cast<Eigen::Index>(it - have.begin()));
  }
  return idx;
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  text = csv::trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  const auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
  if (!y || !m || !d || !days_valid(*y, *m, *d)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::string Date::to_string() const { return fmt::format("{:04d}-{:02d}-{:02d}", year, month, day); }

std::optional<Eigen::Index> PriceFrame::column(std::string_view ticker) const {
  const auto it = std::find(tickers.begin(), tickers.end(), ticker);
  if (it == tickers.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - tickers.begin());
}

PriceFrame PriceFrame::select(const std::vector<std::string>& names) const {
  const auto idx = column_indices(tickers, names);
  return PriceFrame{dates, names, prices(Eigen::all, idx)};
}

PriceFrame PriceFrame::window(std::optional<Date> first, std::optional<Date> last) const {
  std::vector<Eigen::Index> rows_kept;
  PriceFrame out;
  out.tickers = tickers;
  for (std::size_t r = 0; r < dates.size(); ++r) {
    if (first && dates[r] < *first) continue;
    if (last && *last < dates[r]) continue;
    rows_kept.push_back(static_cast<Eigen::Index>(r));
    out.dates.push_back(dates[r]);
  }
  out.prices = prices(rows_kept, Eigen::all);
  return out;
}

std::optional<Eigen::Index> ReturnsFrame::column(std::string_view ticker) const {
  const auto it = std::find(tickers.begin(), tickers.end(), ticker);
  if (it == tickers.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - tickers.begin());
}

ReturnsFrame ReturnsFrame::select(const std::vector<std::string>& names) const {
  const auto idx = column_indices(tickers, names);
  return ReturnsFrame{dates, names, returns(Eigen::all, idx)};
}

PriceFrame load_prices(const std::filesystem::path& path, const CsvSchema& schema) {
  const auto lines = csv::read_lines(path);
  const std::string file = path.string();
  if (lines.empty() || csv::trim(lines.front()).empty()) {
    throw Error(ErrorCode::EmptyFrame, file + ": missing header row");
  }

  auto header = csv::split(lines.front());
  for (auto& h : header) h = std::string(csv::trim(h));
  const auto date_it = std::find(header.begin(), header.end(), schema.date_column);
  if (date_it == header.end()) {
    throw Error(ErrorCode::MalformedRow,
                fmt::format("{}:1: no '{}' column in header", file, schema.date_column));
  }
  const std::size_t date_col = static_cast<std::size_t>(date_it - header.begin());

  std::vector<std::string> tickers = schema.tickers;
  if (tickers.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != date_col) tickers.push_back(header[c]);
    }
  }
  if (tickers.empty()) throw Error(ErrorCode::MalformedRow, file + ":1: no ticker columns");
  std::vector<std::size_t> cols;
  for (const auto& t : tickers) {
    const auto it = std::find(header.begin(), header.end(), t);
    if (it == header.end()) {
      throw Error(ErrorCode::MalformedRow, fmt::format("{}:1: no column '{}'", file, t));
    }
    cols.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  std::vector<Date> dates;
  std::vector<std::vector<double>> rows;
  std::set<Date> seen;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (csv::trim(lines[n]).empty()) continue;
    const std::size_t line_no = n + 1;
    const auto fields = csv::split(lines[n]);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MalformedRow,
                  fmt::format("{}:{}: expected {} fields, found {}", file, line_no,
                              header.size(), fields.size()));
    }
    const auto date = Date::parse(fields[date_col]);
    if (!date) {
      throw Error(ErrorCode::MalformedRow,
                  fmt::format("{}:{}: invalid date '{}'", file, line_no, fields[date_col]));
    }
    if (!seen.insert(*date).second) {
      if (schema.dedup) continue;
      throw Error(ErrorCode::MalformedRow,
                  fmt::format("{}:{}: duplicated date {}", file, line_no, date->to_string()));
    }
    std::vector<double> row;
    row.reserve(cols.size());
    for (std::size_t c : cols) {
      const auto token = csv::trim(fields[c]);
      if (is_missing_token(token)) {
        row.push_back(kNaN);
        continue;
      }
      const auto value = csv::parse_double(token);
      if (!value) {
        throw Error(ErrorCode::MalformedRow,
                    fmt::format("{}:{}: non-numeric value '{}' in column {}", file, line_no,
                                token, header[c]));
      }
      row.push_back(*value);
    }
    dates.push_back(*date);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFrame, file + ": no data rows");

  const auto order = stable_date_order(dates);
  PriceFrame frame;
  frame.tickers = std::move(tickers);
  frame.prices.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < order.size(); ++r) {
    frame.dates.push_back(dates[order[r]]);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      frame.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[order[r]][c];
    }
  }
  return frame;
}

PriceFrame clean(const PriceFrame& frame) {
  if (frame.dates.empty() || frame.tickers.empty()) {
    throw Error(ErrorCode::EmptyFrame, "clean: empty price frame");
  }
  if (frame.rows() != static_cast<Eigen::Index>(frame.dates.size()) ||
      frame.cols() != static_cast<Eigen::Index>(frame.tickers.size())) {
    throw Error(ErrorCode::DimensionMismatch, "clean: matrix shape disagrees with labels");
  }

  std::vector<std::size_t> rows;
  for (std::size_t r : stable_date_order(frame.dates)) {
    if (rows.empty() || frame.dates[rows.back()] != frame.dates[r]) rows.push_back(r);
  }

  const auto missing = [&](std::size_t r, Eigen::Index c) {
    const double v = frame.prices(static_cast<Eigen::Index>(r), c);
    return !std::isfinite(v) || v <= 0.0;
  };

  std::vector<Eigen::Index> cols;
  for (Eigen::Index c = 0; c < frame.cols(); ++c) {
    std::size_t n_missing = 0;
    for (std::size_t r : rows) n_missing += missing(r, c) ? 1 : 0;
    if (2 * n_missing <= rows.size()) cols.push_back(c);
  }

  std::vector<std::size_t> kept;
  for (std::size_t r : rows) {
    if (std::none_of(cols.begin(), cols.end(), [&](Eigen::Index c) { return missing(r, c); })) {
      kept.push_back(r);
    }
  }
  if (kept.empty() || cols.empty()) {
    throw Error(ErrorCode::EmptyFrame, "clean: no complete rows remain");
  }

  PriceFrame out;
  for (Eigen::Index c : cols) out.tickers.push_back(frame.tickers[static_cast<std::size_t>(c)]);
  out.prices.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.dates.push_back(frame.dates[kept[i]]);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          frame.prices(static_cast<Eigen::Index>(kept[i]), cols[j]);
    }
  }
  return out;
}

ReturnsFrame simple_returns(const PriceFrame& frame) {
  if (frame.rows() < 2) throw Error(ErrorCode::TooFewRows, "simple_returns: need at least 2 rows");
  const Eigen::Index n = frame.rows() - 1;
  ReturnsFrame out;
  out.dates.assign(frame.dates.begin() + 1, frame.dates.end());
  out.tickers = frame.tickers;
  out.returns = (frame.prices.bottomRows(n).array() / frame.prices.topRows(n).array() - 1.0).matrix();
  return out;
}

Eigen::VectorXd capm_betas(const ReturnsFrame& asset_returns,
                           const Eigen::Ref<const Eigen::VectorXd>& market_returns) {
  const Eigen::Index n = asset_returns.returns.rows();
  if (market_returns.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("capm: {} market periods vs {} asset periods", market_returns.size(), n));
  }
  if (n < 2) throw Error(ErrorCode::TooFewObservations, "capm: need at least 2 periods");
  const Eigen::VectorXd market_centered = market_returns.array() - market_returns.mean();
  const double market_var = market_centered.squaredNorm() / static_cast<double>(n - 1);
  if (!(market_var > 0.0)) throw Error(ErrorCode::ZeroMarketVariance, "capm: market variance is zero");
  const Eigen::MatrixXd centered = asset_returns.returns.rowwise() - asset_returns.returns.colwise().mean();
  const Eigen::VectorXd cov = centered.transpose() * market_centered / static_cast<double>(n - 1);
  return cov / market_var;
}

Eigen::VectorXd capm_expected_returns(const ReturnsFrame& asset_returns,
                                      const Eigen::Ref<const Eigen::VectorXd>& market_returns,
                                      double rf) {
  const Eigen::VectorXd beta = capm_betas(asset_returns, market_returns);
  const double premium = market_returns.mean() - rf;
  return (rf + beta.array() * premium).matrix();
}

ShrinkageResult ledoit_wolf_covariance(const Eigen::Ref<const Eigen::MatrixXd>& returns,
                                       const ShrinkageOptions& options) {
  const Eigen::Index n = returns.rows();
  const Eigen::Index p = returns.cols();
  if (n < 2 || p < 1) {
    throw Error(ErrorCode::TooFewObservations,
                fmt::format("ledoit_wolf: need >= 2 observations and >= 1 asset, got {}x{}", n, p));
  }
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd x = returns.rowwise() - returns.colwise().mean();
  const Eigen::MatrixXd sample = x.transpose() * x / nd;

  ShrinkageResult result;
  result.sample = sample;
  double alpha = 0.0;

  if (options.target == ShrinkageTarget::ScaledIdentity) {
    const double scale = sample.trace() / static_cast<double>(p);
    result.target = scale * Eigen::MatrixXd::Identity(p, p);
    const double delta = (sample - result.target).squaredNorm() / static_cast<double>(p);
    // Mean squared deviation of the per-observation outer products from S.
    const double fourth = x.rowwise().squaredNorm().array().square().sum() / nd;
    const double beta_bar = (fourth - sample.squaredNorm()) / (nd * static_cast<double>(p));
    alpha = delta > 0.0 ? std::min(beta_bar, delta) / delta : 0.0;
  } else {
    const Eigen::VectorXd sd = sample.diagonal().cwiseSqrt();
    double corr_sum = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (i != j && sd(i) > 0.0 && sd(j) > 0.0) corr_sum += sample(i, j) / (sd(i) * sd(j));
      }
    }
    const double r_bar = p > 1 ? corr_sum / static_cast<double>(p * (p - 1)) : 0.0;
    result.target = r_bar * sd * sd.transpose();
    result.target.diagonal() = sample.diagonal();

    const Eigen::MatrixXd x2 = x.array().square();
    // pi_ij = mean_t (x_ti x_tj - s_ij)^2
    const Eigen::MatrixXd pi_mat = (x2.transpose() * x2) / nd - sample.array().square().matrix();
    const double pi_hat = pi_mat.sum();
    // theta_ii,ij = mean_t (x_ti^2 - s_ii)(x_ti x_tj - s_ij)
    const Eigen::MatrixXd theta = (x.array().cube().matrix().transpose() * x) / nd -
                                  (sample.diagonal().asDiagonal() * sample);
    double rho_hat = pi_mat.diagonal().sum();
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (i == j || sd(i) <= 0.0 || sd(j) <= 0.0) continue;
        rho_hat += 0.5 * r_bar * (sd(j) / sd(i) * theta(i, j) + sd(i) / sd(j) * theta(j, i));
      }
    }
    const double gamma_hat = (result.target - sample).squaredNorm();
    const double kappa = gamma_hat > 0.0 ? (pi_hat - rho_hat) / gamma_hat : 0.0;
    alpha = kappa / nd;
  }

  alpha = std::clamp(alpha, 0.0, 1.0);
  if (options.alpha_override) alpha = *options.alpha_override;
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "ledoit_wolf: shrinkage override outside [0,1]");
  }
  result.alpha = alpha;
  if (alpha == 0.0) {
    result.sigma = sample;
  } else if (alpha == 1.0) {
    result.sigma = result.target;
  } else {
    result.sigma = alpha * result.target + (1.0 - alpha) * sample;
  }
  return result;
}

ShrinkageResult ledoit_wolf_covariance(const ReturnsFrame& returns, const ShrinkageOptions& options) {
  return ledoit_wolf_covariance(returns.returns, options);
}

ReturnsFrame add_forecast_noise(const ReturnsFrame& returns, const NoiseSpec& spec) {
  ReturnsFrame out = returns;
  if (spec.std_dev == 0.0 && spec.mean == 0.0) return out;
  Rng rng(spec.seed);
  for (Eigen::Index t = 0; t < out.returns.rows(); ++t) {
    for (Eigen::Index i = 0; i < out.returns.cols(); ++i) {
      out.returns(t, i) += rng.normal(spec.mean, spec.std_dev);
    }
  }
  return out;
}

PriceFrame add_price_noise(const PriceFrame& prices, const NoiseSpec& spec) {
  PriceFrame out = prices;
  if (spec.std_dev == 0.0 && spec.mean == 0.0) return out;
  Rng rng(spec.seed);
  for (Eigen::Index t = 0; t < out.prices.rows(); ++t) {
    for (Eigen::Index i = 0; i < out.prices.cols(); ++i) {
      double& cell = out.prices(t, i);
      cell += rng.normal(spec.mean, spec.std_dev);
      if (!(cell > 0.0)) cell = kNaN;
    }
  }
  return out;
}

std::vector<std::string> select_top_k(const Eigen::Ref<const Eigen::VectorXd>& mu,
                                      const std::vector<std::string>& tickers, std::size_t k) {
  if (static_cast<std::size_t>(mu.size()) != tickers.size()) {
    throw Error(ErrorCode::DimensionMismatch, "select_top_k: mu and tickers differ in length");
  }
  if (k > tickers.size()) {
    throw Error(ErrorCode::KTooLarge,
                fmt::format("select_top_k: k={} exceeds {} tickers", k, tickers.size()));
  }
  std::vector<std::size_t> order(tickers.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = mu(static_cast<Eigen::Index>(a)), mb = mu(static_cast<Eigen::Index>(b));
    if (ma != mb) return ma > mb;
    return tickers[a] < tickers[b];
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(tickers[order[i]]);
  return out;
}

MarketModel build_market_model(const ReturnsFrame& asset_returns,
                               const Eigen::Ref<const Eigen::VectorXd>& market_returns,
                               double rf_per_period, const ShrinkageOptions& shrinkage) {
  MarketModel model;
  model.mu = capm_expected_returns(asset_returns, market_returns, rf_per_period);
  const auto lw = ledoit_wolf_covariance(asset_returns, shrinkage);
  model.sigma = 0.5 * (lw.sigma + lw.sigma.transpose());
  model.shrinkage_alpha = lw.alpha;
  model.rf = rf_per_period;
  return model;
}

}  // namespace paretofolio
