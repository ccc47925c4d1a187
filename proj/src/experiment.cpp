#include "paretofolio/experiment.hpp"

#include "paretofolio/csv_io.hpp"
#include "paretofolio/error.hpp"
#include "paretofolio/surrogate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace paretofolio {

namespace fs = std::filesystem;

namespace {

constexpr Algorithm kAlgorithms[] = {Algorithm::Nsga2, Algorithm::RNsga2, Algorithm::Nsga3, Algorithm::UNsga3};

std::string_view display_name(Algorithm a) {
  switch (a) {
    case Algorithm::Nsga2: return "NSGA-II";
    case Algorithm::RNsga2: return "R-NSGA-II";
    case Algorithm::Nsga3: return "NSGA-III";
    case Algorithm::UNsga3: return "U-NSGA-III";
  }
  return "?";
}

std::vector<std::string> asset_tickers(const PriceFrame& frame, const std::string& market) {
  std::vector<std::string> out;
  for (const auto& t : frame.tickers) {
    if (t != market) out.push_back(t);
  }
  return out;
}

double risk_value(double variance, RiskAxis axis) {
  return axis == RiskAxis::Volatility ? std::sqrt(std::max(variance, 0.0)) : variance;
}

std::vector<ObjectivePoint> sorted_points(const Population& front) {
  std::vector<ObjectivePoint> pts;
  for (const auto& g : front) pts.push_back(*g.objectives);
  std::sort(pts.begin(), pts.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
    return a.risk != b.risk ? a.risk < b.risk : a.neg_return < b.neg_return;
  });
  return pts;
}

std::vector<ObjectivePoint> read_front(const fs::path& path, RiskAxis axis) {
  const auto lines = csv::read_lines(path);
  std::vector<ObjectivePoint> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (csv::trim(lines[i]).empty()) continue;
    const auto cells = csv::split(lines[i]);
    const auto r = cells.size() == 2 ? csv::parse_double(cells[0]) : std::nullopt;
    const auto ret = cells.size() == 2 ? csv::parse_double(cells[1]) : std::nullopt;
    if (!r || !ret) throw Error(ErrorCode::MalformedRow, fmt::format("{}:{}: expected risk,return", path.string(), i + 1));
    const double variance = axis == RiskAxis::Volatility ? *r * *r : *r;
    out.push_back({variance, -*ret, 0.0});
  }
  return out;
}

std::optional<double> read_mean_time(const fs::path& summary) {
  if (!fs::exists(summary)) return std::nullopt;
  const auto lines = csv::read_lines(summary);
  if (lines.size() < 2) return std::nullopt;
  const auto cells = csv::split(lines[1]);
  if (cells.size() < 3) return std::nullopt;
  return csv::parse_double(cells[2]);
}

}  // namespace

unsigned thread_limit(const ExperimentConfig& config) {
  unsigned limit = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PARETOFOLIO_THREADS")) {
    const auto v = csv::parse_double(env);
    if (v && *v >= 1.0) limit = std::min(limit, static_cast<unsigned>(*v));
  }
  return std::max(1u, limit);
}

std::string campaign_name(Algorithm algorithm, bool surrogate) {
  return std::string(to_string(algorithm)) + (surrogate ? "_sa" : "");
}

std::string campaign_label(Algorithm algorithm, bool surrogate) {
  return (surrogate ? "SA_" : "") + std::string(display_name(algorithm));
}

PrepareSummary cmd_prepare(const ExperimentConfig& config) {
  if (config.prices_path.empty()) throw Error(ErrorCode::InvalidConfig, "prepare: data.prices is not set");
  CsvSchema schema;
  schema.dedup = config.dedup;
  const PriceFrame raw = load_prices(config.prices_path, schema);
  const PriceFrame cleaned = clean(raw);
  if (!cleaned.column(config.market_column)) {
    throw Error(ErrorCode::MissingTicker, "prepare: market column '" + config.market_column + "' is missing or was dropped");
  }
  const auto assets = asset_tickers(cleaned, config.market_column);
  if (assets.empty()) throw Error(ErrorCode::EmptyFrame, "prepare: no asset columns besides the market");

  PriceFrame training = cleaned.window(std::nullopt, config.train_end);
  if (config.noise.target == NoiseTarget::Prices) {
    PriceFrame noisy = add_price_noise(training.select(assets), config.noise);
    const auto m = *training.column(config.market_column);
    noisy.tickers.push_back(config.market_column);
    noisy.prices.conservativeResize(Eigen::NoChange, noisy.cols() + 1);
    noisy.prices.col(noisy.cols() - 1) = training.prices.col(m);
    training = clean(noisy);
  }
  const ReturnsFrame returns = simple_returns(training);
  const Eigen::VectorXd market = returns.returns.col(*returns.column(config.market_column));
  ReturnsFrame forecast = returns.select(asset_tickers(training, config.market_column));
  if (config.noise.target == NoiseTarget::Returns) forecast = add_forecast_noise(forecast, config.noise);

  const Eigen::VectorXd mu = capm_expected_returns(forecast, market, config.rf_per_period());
  const auto universe = select_top_k(mu, forecast.tickers, std::min(config.universe_k, forecast.tickers.size()));

  const fs::path dir = config.output_dir;
  csv::write_prices(dir / "clean.csv", cleaned);
  csv::write_returns(dir / "forecast.csv", forecast);
  ReturnsFrame market_frame{returns.dates, {config.market_column}, market};
  csv::write_returns(dir / "market.csv", market_frame);
  std::string text;
  for (const auto& t : universe) text += t + "\n";
  csv::write_file(dir / "universe.txt", text);

  PrepareSummary s;
  s.raw_rows = static_cast<std::size_t>(raw.rows());
  s.raw_tickers = raw.tickers.size();
  s.clean_rows = static_cast<std::size_t>(cleaned.rows());
  s.clean_tickers = cleaned.tickers.size();
  s.training_periods = static_cast<std::size_t>(forecast.returns.rows());
  s.universe = universe;
  return s;
}

PreparedData load_prepared(const fs::path& dir) {
  PreparedData data;
  data.clean = load_prices(dir / "clean.csv");
  data.forecast = csv::read_returns(dir / "forecast.csv");
  const ReturnsFrame market = csv::read_returns(dir / "market.csv");
  if (market.returns.cols() != 1 || market.dates != data.forecast.dates) {
    throw Error(ErrorCode::DimensionMismatch, "prepared data: market.csv does not line up with forecast.csv");
  }
  data.market = market.returns.col(0);
  for (const auto& line : csv::read_lines(dir / "universe.txt")) {
    const auto t = csv::trim(line);
    if (!t.empty()) data.universe.emplace_back(t);
  }
  if (data.universe.empty()) throw Error(ErrorCode::EmptyFrame, "prepared data: universe.txt is empty");
  return data;
}

MarketModel universe_model(const PreparedData& data, const ExperimentConfig& config) {
  return build_market_model(data.forecast.select(data.universe), data.market, config.rf_per_period(),
                            config.shrinkage);
}

std::vector<OptimizerRun> run_campaign(const Problem& problem, const ExperimentConfig& config) {
  config.run.validate();
  if (config.surrogate) config.surrogate_config.validate(config.run.pop_size);
  const std::size_t runs = static_cast<std::size_t>(config.run.runs);
  std::vector<OptimizerRun> results(runs);
  std::vector<std::exception_ptr> errors(runs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      try {
        RunConfig rc = config.run;
        rc.seed = Rng::derive_seed(config.run.seed, r);
        RunOptions options;
        options.hv = config.hv;
        if (config.surrogate) {
          SurrogateConfig sc = config.surrogate_config;
          sc.seed = Rng::derive_seed(sc.seed, r);
          results[r] = surrogate_assisted_run(problem, rc, sc, options);
        } else {
          results[r] = run(problem, rc, options);
        }
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::min<unsigned>(thread_limit(config), static_cast<unsigned>(runs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // One normalization for the whole campaign so the traces are comparable.
  if (!config.hv.bounds) {
    std::vector<ObjectivePoint> all;
    for (const auto& r : results) all.insert(all.end(), r.archive.begin(), r.archive.end());
    HVConfig hv = config.hv;
    hv.bounds = bounds_from(all);
    for (auto& r : results) compute_hv_traces(r, hv);
  }
  return results;
}

Weights derive_weights(const std::vector<OptimizerRun>& runs, const MarketModel& model, const CostSpec& spec,
                       double gamma_l2) {
  TangencyOptions options;
  for (const auto& r : runs) {
    for (const auto& g : r.final_front) options.warm_starts.push_back(project_to_simplex(decode(g.genes, spec)));
  }
  return tangency_weights_for_gamma(model, gamma_l2, options);
}

OptimizeResult cmd_optimize(const ExperimentConfig& config) {
  const PreparedData data = load_prepared(config.output_dir);
  const MarketModel model = universe_model(data, config);
  const CostSpec spec = config.cost_spec(model.size());
  const Problem problem = portfolio_problem(model, spec);

  OptimizeResult out;
  out.dir = config.output_dir / campaign_name(config.run.algorithm, config.surrogate);
  out.runs = run_campaign(problem, config);
  out.summary = aggregate_traces(out.runs);
  out.weights = derive_weights(out.runs, model, spec, config.gamma_l2);

  std::string log;
  std::string timing = "run,wall_time_sec\n";
  for (std::size_t r = 0; r < out.runs.size(); ++r) {
    const auto& run = out.runs[r];
    std::string front = "risk,return\n";
    for (const auto& p : sorted_points(run.final_front)) {
      front += fmt::format("{},{}\n", csv::number(risk_value(p.risk, config.risk_axis)), csv::number(-p.neg_return));
    }
    csv::write_file(out.dir / fmt::format("front_{}.csv", r), front);

    std::string evals = "generation,exact_evals,hv,archive_hv\n";
    for (std::size_t g = 0; g < run.hv_trace.size(); ++g) {
      evals += fmt::format("{},{},{},{}\n", g + 1, run.evals_at_generation[g], csv::number(run.hv_trace[g]),
                           csv::number(run.archive_hv_trace[g]));
    }
    csv::write_file(out.dir / fmt::format("evals_{}.csv", r), evals);
    timing += fmt::format("{},{}\n", r, csv::number(run.wall_time_seconds));
    for (const auto& line : run.log) log += fmt::format("[run {}] {}\n", r, line);
    log += fmt::format("[run {}] exact evaluations: {}\n", r, run.exact_evals);
  }

  std::string trace = "generation,mean,std\n";
  std::string archive = "generation,mean\n";
  for (std::size_t g = 0; g < out.summary.mean.size(); ++g) {
    trace += fmt::format("{},{},{}\n", g + 1, csv::number(out.summary.mean[g]), csv::number(out.summary.std_dev[g]));
    archive += fmt::format("{},{}\n", g + 1, csv::number(out.summary.archive_mean[g]));
  }
  csv::write_file(out.dir / "hv_trace.csv", trace);
  csv::write_file(out.dir / "archive_hv_trace.csv", archive);

  const double final_hv = out.summary.mean.empty() ? 0.0 : out.summary.mean.back();
  csv::write_file(out.dir / "summary.csv",
                  fmt::format("algorithm,mean_hv,mean_time_sec\n{},{},{}\n",
                              campaign_label(config.run.algorithm, config.surrogate), csv::number(final_hv),
                              csv::number(out.summary.mean_wall_time_seconds)));
  csv::write_file(out.dir / "timing.csv", timing);

  const auto& hv = out.runs.front().hv_config;
  csv::write_file(out.dir / "hv_meta.csv",
                  fmt::format("ideal_risk,ideal_neg_return,nadir_risk,nadir_neg_return,ref_x,ref_y\n{},{},{},{},{},{}\n",
                              csv::number(hv.bounds->ideal(0)), csv::number(hv.bounds->ideal(1)),
                              csv::number(hv.bounds->nadir(0)), csv::number(hv.bounds->nadir(1)),
                              csv::number(hv.ref_point(0)), csv::number(hv.ref_point(1))));
  csv::write_weights(out.dir / "weights.csv", {data.universe, out.weights});
  csv::write_file(out.dir / "run_log.txt", log);
  return out;
}

BacktestResult cmd_backtest(const ExperimentConfig& config, const std::optional<fs::path>& weights_file,
                            std::optional<std::pair<Algorithm, bool>> campaign) {
  const PreparedData data = load_prepared(config.output_dir);
  const PriceFrame& prices = data.clean;

  BacktestSpec base;
  base.rf_annual = config.rf_annual;
  base.trading_days = config.periods_per_year;
  base.rebalance_every = config.rebalance_every;
  if (config.backtest_start) {
    base.start = *config.backtest_start;
  } else {
    const auto it = config.train_end ? std::upper_bound(prices.dates.begin(), prices.dates.end(), *config.train_end)
                                     : prices.dates.begin();
    if (it == prices.dates.end()) throw Error(ErrorCode::EmptyWindow, "backtest: no dates after data.train_end");
    base.start = *it;
  }
  base.end = config.backtest_end.value_or(prices.dates.back());

  auto report_for = [&](const std::vector<std::string>& tickers, const Weights& w) {
    BacktestSpec spec = base;
    spec.tickers = tickers;
    spec.weights = w;
    return run_backtest(prices, spec);
  };

  const auto n = static_cast<Eigen::Index>(data.universe.size());
  NamedReport baseline{"No GA", report_for(data.universe, Weights::Constant(n, 1.0 / static_cast<double>(n))), std::nullopt};

  std::vector<NamedReport> candidates;
  auto add_campaign = [&](Algorithm a, bool sa, bool required) {
    const fs::path dir = config.output_dir / campaign_name(a, sa);
    if (!fs::exists(dir / "weights.csv")) {
      if (required) throw Error(ErrorCode::FileNotFound, "backtest: no weights for " + campaign_name(a, sa) + "; run optimize first");
      return;
    }
    const auto w = csv::read_weights(dir / "weights.csv");
    candidates.push_back({campaign_label(a, sa), report_for(w.tickers, w.weights), read_mean_time(dir / "summary.csv")});
  };
  if (weights_file) {
    const auto w = csv::read_weights(*weights_file);
    candidates.push_back({weights_file->stem().string(), report_for(w.tickers, w.weights), std::nullopt});
  } else if (campaign) {
    add_campaign(campaign->first, campaign->second, true);
  } else {
    for (bool sa : {false, true}) {
      for (Algorithm a : kAlgorithms) add_campaign(a, sa, false);
    }
  }

  BacktestResult result;
  result.rows = compare_backtests(baseline, candidates);
  result.path = config.output_dir / "backtest.csv";
  csv::write_file(result.path, comparison_csv(result.rows));
  return result;
}

fs::path cmd_report(const ExperimentConfig& config) {
  struct Campaign {
    std::string label;
    std::vector<std::vector<ObjectivePoint>> fronts;
    std::optional<double> time;
  };
  std::vector<Campaign> campaigns;
  std::vector<ObjectivePoint> all;
  for (bool sa : {false, true}) {
    for (Algorithm a : kAlgorithms) {
      const fs::path dir = config.output_dir / campaign_name(a, sa);
      Campaign c{campaign_label(a, sa), {}, read_mean_time(dir / "summary.csv")};
      for (int r = 0; fs::exists(dir / fmt::format("front_{}.csv", r)); ++r) {
        c.fronts.push_back(read_front(dir / fmt::format("front_{}.csv", r), config.risk_axis));
        all.insert(all.end(), c.fronts.back().begin(), c.fronts.back().end());
      }
      if (!c.fronts.empty()) campaigns.push_back(std::move(c));
    }
  }
  if (campaigns.empty()) throw Error(ErrorCode::FileNotFound, "report: no campaign output under " + config.output_dir.string());

  HVConfig hv = config.hv;
  if (!hv.bounds) hv.bounds = bounds_from(all);
  std::string out = "algorithm,runs,mean_hv,std_hv,mean_time_sec\n";
  for (const auto& c : campaigns) {
    std::vector<double> values;
    for (const auto& f : c.fronts) values.push_back(normalized_hypervolume(f, hv));
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
    out += fmt::format("{},{},{},{},{}\n", c.label, values.size(), csv::number(mean), csv::number(sd),
                       c.time ? csv::number(*c.time) : std::string("-"));
  }
  const fs::path path = config.output_dir / "report.csv";
  csv::write_file(path, out);
  return path;
}

}  // namespace paretofolio
