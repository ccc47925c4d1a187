// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "oracles.hpp"

#include "paretofolio/backtest.hpp"
#include "paretofolio/config.hpp"
#include "paretofolio/csv_io.hpp"
#include "paretofolio/error.hpp"
#include "paretofolio/evolve.hpp"
#include "paretofolio/experiment.hpp"
#include "paretofolio/indicators.hpp"
#include "paretofolio/market_data.hpp"
#include "paretofolio/surrogate.hpp"

#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>

using namespace paretofolio;
namespace fs = std::filesystem;

namespace {

const std::vector<Algorithm> kAlgorithms{Algorithm::Nsga2, Algorithm::RNsga2, Algorithm::Nsga3, Algorithm::UNsga3};

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] < v[k - 1]) return false;
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path example_config() { return fs::path(PARETOFOLIO_SOURCE_DIR) / "configs" / "example.cfg"; }

// Archive traces collected by criteria 3 and 4 for criterion 10.
std::vector<std::pair<std::string, std::vector<double>>> g_archive_traces;
// Every backtest report produced along the way, for the consistency check in 7.
std::vector<BacktestReport> g_reports;

Outcome sort_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  int mismatches = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 1 + rng.uniform_index(200);
    const auto pts = oracle::random_points(rng, n, 0.3 * rng.uniform());
    auto got = fast_non_dominated_sort(pts);
    auto want = oracle::peel_fronts(pts);
    for (auto& f : got) std::sort(f.begin(), f.end());
    for (auto& f : want) std::sort(f.begin(), f.end());
    mismatches += got != want;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 30.0, fmt::format("{} mismatches in 1000 instances, {:.2f} s", mismatches, secs)};
}

Outcome hv_oracle() {
  Eigen::MatrixX2d one(1, 2);
  one << 0, 0;
  Eigen::MatrixX2d two(2, 2);
  two << 0, 0.5, 0.5, 0;
  const bool analytic = hypervolume_2d(one, Eigen::Vector2d(1, 1)) == 1.0 && hypervolume_2d(two, Eigen::Vector2d(1, 1)) == 0.75;

  Rng rng(2002);
  const Eigen::Vector2d ref(1.1, 1.1);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + static_cast<int>(rng.uniform_index(30));
    Eigen::MatrixX2d f(n, 2);
    for (int i = 0; i < n; ++i) f.row(i) << rng.uniform(), rng.uniform();
    const double mc = oracle::monte_carlo_hv(f, ref, Eigen::Vector2d::Zero(), 1'000'000, 5000 + k);
    worst = std::max(worst, std::abs(hypervolume_2d(f, ref) - mc));
  }
  return {analytic && worst <= 0.005, fmt::format("analytic cases {}, worst |exact - MC| = {:.5f}", analytic ? "exact" : "wrong", worst)};
}

Outcome frontier_convergence() {
  MarketModel m;
  m.mu = Eigen::Vector2d(0.08, 0.15);
  m.sigma = (Eigen::Matrix2d() << 0.04, 0.006, 0.006, 0.09).finished();
  const auto problem = portfolio_problem(m, CostSpec::zero(2));
  const auto curve = oracle::two_asset_frontier(m.mu, m.sigma, 100);
  Outcome out;
  for (auto alg : kAlgorithms) {
    const auto t0 = std::chrono::steady_clock::now();
    int good = 0;
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      RunConfig rc;
      rc.algorithm = alg;
      rc.seed = Rng::derive_seed(3003, static_cast<std::uint64_t>(s));
      const auto r = run(problem, rc);
      std::vector<ObjectivePoint> front;
      for (const auto& g : r.final_front) front.push_back(*g.objectives);
      const double d = oracle::one_sided_hausdorff(front, curve);
      worst = std::max(worst, d);
      good += d < 0.02;
      g_archive_traces.emplace_back(fmt::format("frontier {} seed {}", to_string(alg), s), r.archive_hv_trace);
    }
    const double secs = seconds_since(t0);
    out.pass &= good >= 9 && secs < 10.0;
    out.detail += fmt::format("{} {}/10 (worst {:.4f}, {:.2f} s); ", to_string(alg), good, worst, secs);
  }
  return out;
}

struct Fixture {
  ExperimentConfig config;
  PreparedData data;
  MarketModel model;
  Problem problem;
};

Fixture prepare_fixture(const std::string& tag, const KeyValues& overrides = {}) {
  Fixture f;
  f.config = load_config(example_config(), overrides);
  f.config.output_dir = oracle::temp_dir(tag);
  cmd_prepare(f.config);
  f.data = load_prepared(f.config.output_dir);
  f.model = universe_model(f.data, f.config);
  f.problem = portfolio_problem(f.model, f.config.cost_spec(static_cast<Eigen::Index>(f.data.universe.size())));
  return f;
}

std::vector<ObjectivePoint> archive_prefix(const OptimizerRun& r, std::size_t evals) {
  return {r.archive.begin(), r.archive.begin() + static_cast<std::ptrdiff_t>(std::min(evals, r.archive.size()))};
}

// Shared with criterion 5.
std::vector<OptimizerRun> g_surrogate_runs;
std::size_t g_budget = 0;

Outcome surrogate_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fx = prepare_fixture("accept4");
  const RunConfig base_rc = fx.config.run;
  const SurrogateConfig sc_base = fx.config.surrogate_config;
  const std::size_t budget = static_cast<std::size_t>(sc_base.n_max_doe + base_rc.generations * sc_base.n_max_infills);
  g_budget = budget;
  Outcome out;
  for (auto alg : kAlgorithms) {
    int wins = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
      RunConfig rc = base_rc;
      rc.algorithm = alg;
      rc.seed = s;
      SurrogateConfig sc = sc_base;
      sc.seed = s;
      auto sa = surrogate_assisted_run(fx.problem, rc, sc);
      // The baseline runs until it has spent at least the same number of exact evaluations.
      RunConfig brc = rc;
      brc.generations = static_cast<int>((budget - static_cast<std::size_t>(rc.pop_size) + rc.pop_size - 1) / rc.pop_size);
      auto base = run(fx.problem, brc);

      const auto sa_pts = archive_prefix(sa, budget);
      const auto base_pts = archive_prefix(base, budget);
      std::vector<ObjectivePoint> all = sa_pts;
      all.insert(all.end(), base_pts.begin(), base_pts.end());
      std::vector<ObjectivePoint> feasible;
      for (const auto& p : all)
        if (p.feasible()) feasible.push_back(p);
      HVConfig hv;
      hv.bounds = bounds_from(feasible);
      const double hv_sa = normalized_hypervolume(sa_pts, hv);
      const double hv_base = normalized_hypervolume(base_pts, hv);
      wins += hv_sa >= hv_base;

      compute_hv_traces(sa, hv);
      compute_hv_traces(base, hv);
      g_archive_traces.emplace_back(fmt::format("fixture SA {} seed {}", to_string(alg), s), sa.archive_hv_trace);
      g_archive_traces.emplace_back(fmt::format("fixture {} seed {}", to_string(alg), s), base.archive_hv_trace);
      g_surrogate_runs.push_back(std::move(sa));
    }
    out.pass &= wins >= 7;
    out.detail += fmt::format("{} {}/10; ", to_string(alg), wins);
  }
  const double secs = seconds_since(t0);
  out.pass &= secs < 300.0;
  out.detail += fmt::format("budget {} exact evals, {:.1f} s", budget, secs);
  return out;
}

Outcome surrogate_budget() {
  bool within = !g_surrogate_runs.empty();
  for (const auto& r : g_surrogate_runs) within &= r.exact_evals <= g_budget;

  // Extra budget checks with other settings.
  const auto fx = prepare_fixture("accept5");
  for (int alpha : {0, 1, 3})
    for (int infills : {1, 6, 12}) {
      RunConfig rc = fx.config.run;
      rc.generations = 5;
      SurrogateConfig sc = fx.config.surrogate_config;
      sc.alpha = alpha;
      sc.n_max_infills = infills;
      const auto r = surrogate_assisted_run(fx.problem, rc, sc);
      within &= r.exact_evals <= static_cast<std::size_t>(sc.n_max_doe + rc.generations * sc.n_max_infills);
    }

  int equal = 0;
  for (auto alg : kAlgorithms)
    for (std::uint64_t s = 1; s <= 10; ++s) {
      RunConfig rc = fx.config.run;
      rc.algorithm = alg;
      rc.seed = s;
      SurrogateConfig sc;
      sc.alpha = 0;
      sc.beta = 1;
      sc.n_max_infills = rc.pop_size;
      sc.n_max_doe = rc.pop_size;
      sc.seed = s;
      const auto sa = surrogate_assisted_run(fx.problem, rc, sc);
      RunOptions opt;
      opt.initial_population = sa.initial_population;
      equal += run(fx.problem, rc, opt).populations == sa.populations;
    }
  return {within && equal == 40,
          fmt::format("budget {} on {} runs; degenerate config equals baseline in {}/40", within ? "held" : "violated",
                      g_surrogate_runs.size() + 9, equal)};
}

Outcome estimator_endpoints() {
  Rng rng(6006);
  Eigen::MatrixXd r(60, 5);
  for (auto& v : r.reshaped()) v = rng.normal(0.0, 0.02);
  double lw = 0.0;
  for (auto target : {ShrinkageTarget::ScaledIdentity, ShrinkageTarget::ConstantCorrelation}) {
    ShrinkageOptions o{target, 0.0};
    const auto s0 = ledoit_wolf_covariance(r, o);
    lw = std::max(lw, (s0.sigma - s0.sample).cwiseAbs().maxCoeff());
    o.alpha_override = 1.0;
    const auto s1 = ledoit_wolf_covariance(r, o);
    lw = std::max(lw, (s1.sigma - s1.target).cwiseAbs().maxCoeff());
  }

  ReturnsFrame market;
  market.tickers = {"MKT"};
  market.returns = r.col(0);
  for (int t = 0; t < 60; ++t) market.dates.push_back({2021, 1 + t / 28, 1 + t % 28});
  const double beta_err = std::abs(capm_betas(market, r.col(0))(0) - 1.0);

  ReturnsFrame rf;
  rf.tickers = {"A", "B", "C", "D", "E"};
  rf.dates = market.dates;
  rf.returns = r;
  NoiseSpec zero;
  zero.std_dev = 0.0;
  zero.seed = 9;
  const bool identity = add_forecast_noise(rf, zero).returns == r;
  return {lw <= 1e-12 && beta_err <= 1e-12 && identity,
          fmt::format("LW endpoint error {:.1e}, market beta error {:.1e}, zero noise {}", lw, beta_err,
                      identity ? "identity" : "changed data")};
}

Outcome backtest_oracle() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = oracle::gbm_frame(5, 253, 7000 + seed);
    Rng rng(seed);
    Eigen::VectorXd w(5);
    for (auto& v : w) v = rng.uniform();
    w /= w.sum();
    BacktestSpec spec;
    spec.tickers = f.tickers;
    spec.weights = w;
    spec.start = f.dates.front();
    spec.end = f.dates.back();
    const auto rep = run_backtest(f, spec);
    const auto want = oracle::buy_and_hold(f.prices, w, spec.rf_annual);
    worst = std::max({worst, std::abs(rep.expected_annual_return - want.return_pct),
                      std::abs(rep.annual_volatility - want.vol_pct), std::abs(rep.sharpe - want.sharpe)});
    g_reports.push_back(rep);
  }
  double consistency = 0.0;
  for (const auto& r : g_reports) {
    const double implied = (r.expected_annual_return / 100 - r.rf_annual) / (r.annual_volatility / 100);
    consistency = std::max(consistency, std::abs(r.sharpe - implied) / std::max(1.0, std::abs(implied)));
  }
  return {worst <= 1e-8 && consistency <= 1e-9,
          fmt::format("worst field error {:.1e} over 5 series, Sharpe consistency {:.1e} on {} reports", worst,
                      consistency, g_reports.size())};
}

Outcome backtest_ordering() {
  int wins = 0;
  std::string sharpes;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto seed = std::to_string(s);
    auto fx = prepare_fixture("accept8", {{"noise.seed", seed}, {"evolve.seed", seed}});
    cmd_optimize(fx.config);
    const auto bt = cmd_backtest(fx.config, std::nullopt, std::pair{Algorithm::Nsga2, false});
    double ga = 0, none = 0;
    for (const auto& row : bt.rows) (row.name == "No GA" ? none : ga) = row.sharpe;
    wins += ga >= none;
    sharpes += fmt::format(" {:.2f}/{:.2f}", ga, none);
    for (const auto& row : bt.rows) {
      BacktestReport r;
      r.sharpe = row.sharpe;
      r.expected_annual_return = row.return_pct;
      r.annual_volatility = row.volatility_pct;
      r.rf_annual = fx.config.rf_annual;
      g_reports.push_back(r);
    }
  }
  return {wins >= 8, fmt::format("GA >= equal weight in {}/10 seeds (GA/equal:{})", wins, sharpes)};
}

Outcome determinism() {
  std::vector<fs::path> dirs;
  for (const char* tag : {"accept9a", "accept9b"}) {
    auto fx = prepare_fixture(tag, {{"evolve.runs", "4"}});
    cmd_optimize(fx.config);
    fx.config.surrogate = true;
    fx.config.run.algorithm = Algorithm::Nsga3;
    cmd_optimize(fx.config);
    dirs.push_back(fx.config.output_dir);
  }
  int compared = 0, differ = 0;
  for (const char* campaign : {"nsga2", "nsga3_sa"}) {
    for (const auto& entry : fs::directory_iterator(dirs[0] / campaign)) {
      const auto name = entry.path().filename().string();
      if (name == "timing.csv" || name == "summary.csv" || name == "run_log.txt") continue;
      ++compared;
      differ += slurp(entry.path()) != slurp(dirs[1] / campaign / name);
    }
  }
  return {compared > 0 && differ == 0, fmt::format("{} files compared, {} differ", compared, differ)};
}

Outcome archive_monotone() {
  int bad = 0;
  std::string first;
  for (const auto& [name, trace] : g_archive_traces) {
    if (!non_decreasing(trace)) {
      if (bad++ == 0) first = name;
    }
  }
  return {!g_archive_traces.empty() && bad == 0,
          fmt::format("{} traces, {} decreasing{}", g_archive_traces.size(), bad, bad ? " (first: " + first + ")" : "")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"non-dominated sort matches brute force", sort_oracle},
      {"exact hypervolume matches Monte Carlo", hv_oracle},
      {"fronts converge to the analytic two-asset frontier", frontier_convergence},
      {"surrogate-assisted HV >= baseline at equal exact evaluations", surrogate_ordering},
      {"surrogate evaluation budget and degenerate equivalence", surrogate_budget},
      {"estimator endpoints", estimator_endpoints},
      {"backtest formulas match recomputation", backtest_oracle},
      {"tangency weights beat equal weights in backtest", backtest_ordering},
      {"optimize output is byte-identical across executions", determinism},
      {"archive hypervolume never decreases", archive_monotone},
  };
  // 7 checks consistency over every report, so it runs after 8.
  const std::vector<std::size_t> order{0, 1, 2, 3, 4, 5, 7, 6, 8, 9};
  std::vector<std::string> lines(criteria.size());
  bool all = true;
  for (std::size_t i : order) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    all &= o.pass;
    lines[i] = fmt::format("{} {:2} {}: {}", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    fmt::print(stderr, "[{}] done\n", i + 1);
  }
  for (const auto& l : lines) fmt::print("{}\n", l);
  return all ? 0 : 1;
}
