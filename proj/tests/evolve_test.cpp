#include "oracles.hpp"

#include "paretofolio/error.hpp"
#include "paretofolio/evolve.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace paretofolio;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// genes(0) carries the member's original index so selections can be compared.
Population population_of(const std::vector<ObjectivePoint>& pts) {
  Population pop;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Genome g;
    g.genes = Eigen::VectorXd::Constant(1, static_cast<double>(i));
    g.objectives = pts[i];
    pop.push_back(g);
  }
  return pop;
}

std::vector<std::size_t> ids(const Population& pop) {
  std::vector<std::size_t> out;
  for (const auto& g : pop) out.push_back(static_cast<std::size_t>(g.genes(0)));
  return out;
}

std::set<std::size_t> id_set(const Population& pop) {
  const auto v = ids(pop);
  return {v.begin(), v.end()};
}

std::vector<ObjectivePoint> random_front_points(Rng& rng, std::size_t n) {
  std::vector<ObjectivePoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    pts.push_back({x, 1.0 - std::sqrt(x) + 0.3 * rng.uniform(), 0.0});
  }
  return pts;
}

std::vector<std::size_t> nsga2_oracle(const std::vector<ObjectivePoint>& pts, std::size_t k) {
  std::vector<std::size_t> out;
  for (const auto& layer : oracle::peel_fronts(pts)) {
    if (out.size() + layer.size() <= k) {
      out.insert(out.end(), layer.begin(), layer.end());
      continue;
    }
    std::vector<ObjectivePoint> fp;
    for (std::size_t i : layer) fp.push_back(pts[i]);
    const auto cd = oracle::crowding(fp);
    std::vector<std::size_t> order(layer.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    for (std::size_t j = 0; out.size() < k; ++j) out.push_back(layer[order[j]]);
    break;
  }
  return out;
}

// NSGA-III niching written out for two objectives.
std::vector<std::size_t> nsga3_oracle(const std::vector<ObjectivePoint>& pts, std::size_t k, int p) {
  const auto layers = oracle::peel_fronts(pts);
  std::vector<std::size_t> chosen, last;
  for (const auto& layer : layers) {
    if (chosen.size() + layer.size() <= k) {
      chosen.insert(chosen.end(), layer.begin(), layer.end());
      if (chosen.size() == k) break;
      continue;
    }
    last = layer;
    break;
  }
  if (last.empty()) return chosen;
  std::vector<std::size_t> s = chosen;
  s.insert(s.end(), last.begin(), last.end());

  double ix = kInf, iy = kInf;
  for (std::size_t i : s) {
    ix = std::min(ix, pts[i].risk);
    iy = std::min(iy, pts[i].neg_return);
  }
  std::vector<double> x, y;
  for (std::size_t i : s) {
    x.push_back(pts[i].risk - ix);
    y.push_back(pts[i].neg_return - iy);
  }
  auto extreme = [&](bool first) {
    std::size_t best = 0;
    double val = kInf;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double asf = first ? std::max(x[j], y[j] / 1e-6) : std::max(x[j] / 1e-6, y[j]);
      if (asf < val) {
        val = asf;
        best = j;
      }
    }
    return best;
  };
  const std::size_t e1 = extreme(true), e2 = extreme(false);
  // Line u x + v y = 1 through both extremes, by Cramer's rule.
  const double det = x[e1] * y[e2] - x[e2] * y[e1];
  double ax = 0, ay = 0;
  bool ok = std::abs(det) > 1e-12 * std::max(1.0, std::abs(x[e1] * y[e2]));
  if (ok) {
    const double u = (y[e2] - y[e1]) / det;
    const double v = (x[e1] - x[e2]) / det;
    ax = 1 / u;
    ay = 1 / v;
    ok = std::isfinite(ax) && std::isfinite(ay) && ax > 1e-6 && ay > 1e-6;
  }
  if (!ok) {
    ax = *std::max_element(x.begin(), x.end());
    ay = *std::max_element(y.begin(), y.end());
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    x[j] = ax > 1e-12 ? x[j] / ax : 0.0;
    y[j] = ay > 1e-12 ? y[j] / ay : 0.0;
  }
  std::vector<int> niche(s.size());
  std::vector<double> dist(s.size(), kInf);
  for (std::size_t j = 0; j < s.size(); ++j) {
    for (int d = 0; d <= p; ++d) {
      const double dx = static_cast<double>(d) / p, dy = 1.0 - dx;
      const double t = (x[j] * dx + y[j] * dy) / (dx * dx + dy * dy);
      const double pd = std::hypot(x[j] - t * dx, y[j] - t * dy);
      if (pd < dist[j]) {
        dist[j] = pd;
        niche[j] = d;
      }
    }
  }
  std::vector<int> count(static_cast<std::size_t>(p + 1), 0);
  for (std::size_t j = 0; j < chosen.size(); ++j) ++count[static_cast<std::size_t>(niche[j])];
  std::vector<bool> used(s.size(), false), closed(static_cast<std::size_t>(p + 1), false);
  std::vector<std::size_t> out = chosen;
  while (out.size() < k) {
    int d = -1;
    for (int c = 0; c <= p; ++c) {
      if (!closed[static_cast<std::size_t>(c)] && (d < 0 || count[static_cast<std::size_t>(c)] < count[static_cast<std::size_t>(d)])) d = c;
    }
    std::size_t pick = s.size();
    for (std::size_t j = chosen.size(); j < s.size(); ++j) {
      if (!used[j] && niche[j] == d && (pick == s.size() || dist[j] < dist[pick])) pick = j;
    }
    if (pick == s.size()) {
      closed[static_cast<std::size_t>(d)] = true;
      continue;
    }
    used[pick] = true;
    ++count[static_cast<std::size_t>(d)];
    out.push_back(s[pick]);
  }
  return out;
}

Problem two_asset_problem() {
  MarketModel m;
  m.mu = Eigen::Vector2d(0.08, 0.15);
  m.sigma = (Eigen::Matrix2d() << 0.04, 0.006, 0.006, 0.09).finished();
  return portfolio_problem(m, CostSpec::zero(2));
}

}  // namespace

TEST_CASE("non-dominated sort small cases") {
  const std::vector<ObjectivePoint> chain{{1, 1, 0}, {2, 2, 0}};
  CHECK(fast_non_dominated_sort(chain) == std::vector<std::vector<std::size_t>>{{0}, {1}});
  const std::vector<ObjectivePoint> pair{{1, 2, 0}, {2, 1, 0}};
  CHECK(fast_non_dominated_sort(pair) == std::vector<std::vector<std::size_t>>{{0, 1}});
  // Feasibility first, then smaller violation.
  const std::vector<ObjectivePoint> cons{{5, 5, 0.2}, {9, 9, 0}, {0, 0, 0.5}};
  CHECK(fast_non_dominated_sort(cons) == std::vector<std::vector<std::size_t>>{{1}, {0}, {2}});
  const std::vector<ObjectivePoint> bad{{std::nan(""), 0, 0}};
  CHECK_THROWS_AS(fast_non_dominated_sort(bad), Error);
  CHECK(fast_non_dominated_sort(std::vector<ObjectivePoint>{}).empty());
}

TEST_CASE("non-dominated sort matches brute force") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = oracle::random_points(rng, 1 + rng.uniform_index(50), 0.3);
    CHECK(fast_non_dominated_sort(pts) == oracle::peel_fronts(pts));
  }
}

TEST_CASE("crowding distance") {
  const std::vector<ObjectivePoint> two{{0, 1, 0}, {1, 0, 0}};
  CHECK(crowding_distance(two) == std::vector<double>{kInf, kInf});
  const std::vector<ObjectivePoint> line{{0, 2, 0}, {1, 1, 0}, {2, 0, 0}};
  const auto d = crowding_distance(line);
  CHECK(d[0] == kInf);
  CHECK(d[2] == kInf);
  CHECK(d[1] == doctest::Approx(2.0));

  std::vector<ObjectivePoint> curve;
  for (double x : {0.0, 0.1, 0.4, 1.0}) curve.push_back({x, 1.0 - std::sqrt(x), 0});
  CHECK(crowding_distance(curve) == oracle::crowding(curve));

  // A flat axis contributes nothing.
  const std::vector<ObjectivePoint> flat{{0, 1, 0}, {1, 1, 0}, {3, 1, 0}};
  const auto f = crowding_distance(flat);
  CHECK(f[1] == doctest::Approx(1.0));
  CHECK(f[0] == kInf);

  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_front_points(rng, 3 + rng.uniform_index(15));
    CHECK(crowding_distance(pts) == oracle::crowding(pts));
  }
}

TEST_CASE("binary tournament") {
  auto pop = population_of({{0, 0, 0}, {1, 1, 0}});
  pop[0].rank = 0;
  pop[1].rank = 1;
  Rng rng(33);
  for (int i = 0; i < 100; ++i) CHECK(binary_tournament(pop, rng) == 0);

  pop[1].rank = 0;
  pop[0].crowding = 0.5;
  pop[1].crowding = kInf;
  for (int i = 0; i < 100; ++i) CHECK(binary_tournament(pop, rng) == 1);

  pop[0].crowding = pop[1].crowding = 1.0;
  int wins = 0;
  for (int i = 0; i < 10000; ++i) wins += binary_tournament(pop, rng) == 0;
  CHECK(std::abs(wins / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("SBX crossover") {
  Rng rng(34);
  Genome a, b;
  a.genes = Eigen::Vector3d(0.1, 0.5, 0.9);
  b.genes = Eigen::Vector3d(0.7, 0.2, 0.3);
  auto [c1, c2] = sbx_crossover(a, b, 15, 0.0, rng);
  CHECK(c1.genes == a.genes);
  CHECK(c2.genes == b.genes);
  auto [d1, d2] = sbx_crossover(a, a, 15, 1.0, rng);
  CHECK(d1.genes == a.genes);
  CHECK(d2.genes == a.genes);

  bool changed = false;
  for (int i = 0; i < 100000; ++i) {
    Genome p, q;
    p.genes = Eigen::Vector2d(rng.uniform(), rng.uniform());
    q.genes = Eigen::Vector2d(rng.uniform(), rng.uniform());
    auto [x, y] = sbx_crossover(p, q, 15, 0.9, rng);
    CHECK(((x.genes.array() >= 0).all() && (x.genes.array() <= 1).all()));
    CHECK(((y.genes.array() >= 0).all() && (y.genes.array() <= 1).all()));
    changed |= x.genes != p.genes;
  }
  CHECK(changed);
}

TEST_CASE("polynomial mutation") {
  Rng rng(35);
  Genome g;
  g.genes = Eigen::Vector3d(0.0, 0.5, 1.0);
  CHECK(polynomial_mutation(g, 20, 0.0, rng).genes == g.genes);

  Genome low;
  low.genes = Eigen::VectorXd::Zero(1);
  for (int i = 0; i < 1000; ++i) CHECK(polynomial_mutation(low, 20, 1.0, rng).genes(0) >= 0.0);

  for (int i = 0; i < 100000; ++i) {
    Genome h;
    h.genes = Eigen::Vector2d(rng.uniform(), rng.uniform());
    const auto m = polynomial_mutation(h, 20, 1.0, rng);
    CHECK(((m.genes.array() >= 0).all() && (m.genes.array() <= 1).all()));
  }
}

TEST_CASE("NSGA-II survival") {
  Rng rng(36);
  // One front of 24: top 12 by crowding.
  std::vector<ObjectivePoint> one;
  for (int i = 0; i < 24; ++i) {
    const double x = rng.uniform();
    one.push_back({x, 1 - x, 0});
  }
  const auto sel = nsga2_survival(population_of(one), 12);
  CHECK(sel.size() == 12);
  CHECK(ids(sel) == nsga2_oracle(one, 12));

  // Front 0 is exactly the population.
  std::vector<ObjectivePoint> layered;
  for (int i = 0; i < 4; ++i) layered.push_back({double(i), 3.0 - i, 0});
  for (int i = 0; i < 4; ++i) layered.push_back({double(i) + 1, 4.0 - i, 0});
  CHECK(id_set(nsga2_survival(population_of(layered), 4)) == std::set<std::size_t>{0, 1, 2, 3});

  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = oracle::random_points(rng, 24, 0.2);
    CHECK(ids(nsga2_survival(population_of(pts), 12)) == nsga2_oracle(pts, 12));
  }
  CHECK_THROWS_AS(nsga2_survival(population_of(layered), 9), Error);
}

TEST_CASE("single-objective collapse sorts by risk") {
  Rng rng(37);
  std::vector<ObjectivePoint> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({rng.uniform(), 0.25, 0});
  auto order = std::vector<std::size_t>(20);
  for (std::size_t i = 0; i < 20; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pts[a].risk < pts[b].risk; });
  const auto sel = nsga2_survival(population_of(pts), 7);
  CHECK(id_set(sel) == std::set<std::size_t>(order.begin(), order.begin() + 7));
}

TEST_CASE("R-NSGA-II survival") {
  ReferencePoints refs;
  refs.epsilon = 0.01;
  // One front of four; the reference sits on member 2.
  const std::vector<ObjectivePoint> pts{{0, 1, 0}, {0.3, 0.6, 0}, {0.6, 0.3, 0}, {1, 0, 0}};
  refs.points = {Eigen::Vector2d(0.6, 0.3)};
  CHECK(ids(rnsga2_survival(population_of(pts), 1, refs)) == std::vector<std::size_t>{2});

  // Equidistant from members 1 and 2: the lower index wins.
  refs.points = {Eigen::Vector2d(0.45, 0.45)};
  CHECK(ids(rnsga2_survival(population_of(pts), 1, refs)) == std::vector<std::size_t>{1});

  // Hand trace: distances rank 2, 1, 0, 3; taking 2 demotes 1 (within 0.1).
  const std::vector<ObjectivePoint> q{{0, 1, 0}, {0.1, 0.5, 0}, {0.12, 0.48, 0}, {1, 0, 0}};
  refs.points = {Eigen::Vector2d(0.1, 0.45)};
  refs.epsilon = 0.1;
  CHECK(ids(rnsga2_survival(population_of(q), 2, refs)) == std::vector<std::size_t>{2, 0});
  CHECK(ids(rnsga2_survival(population_of(q), 3, refs)) == std::vector<std::size_t>{2, 0, 3});
  CHECK(ids(rnsga2_survival(population_of(q), 4, refs)) == std::vector<std::size_t>{0, 1, 2, 3});

  // Two references, twelve on one front.
  std::vector<ObjectivePoint> twelve;
  for (int i = 0; i < 12; ++i) {
    const double x = i / 11.0;
    twelve.push_back({x, (1 - x) * (1 - x), 0});
  }
  refs.points = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0)};
  refs.epsilon = 0.1;
  // Member 11 sits on a reference; member 10 is within 0.1 of it and waits.
  const auto sel = rnsga2_survival(population_of(twelve), 6, refs);
  CHECK(ids(sel).front() == 11);
  CHECK(id_set(sel).count(10) == 0);

  refs.points.clear();
  CHECK_THROWS_AS(rnsga2_survival(population_of(pts), 2, refs), Error);
}

TEST_CASE("Das-Dennis directions") {
  const auto d = das_dennis(2, 4);
  REQUIRE(d.dirs.size() == 5);
  for (int k = 0; k <= 4; ++k) {
    CHECK(d.dirs[static_cast<std::size_t>(k)](0) == doctest::Approx(k / 4.0));
    CHECK(d.dirs[static_cast<std::size_t>(k)](1) == doctest::Approx(1 - k / 4.0));
  }
  const auto u = das_dennis(3, 1);
  CHECK(u.dirs.size() == 3);
  for (const auto& v : u.dirs) CHECK(v.maxCoeff() == 1.0);
  const auto big = das_dennis(3, 12);
  CHECK(big.dirs.size() == 91);
  for (const auto& v : big.dirs) {
    CHECK(std::abs(v.sum() - 1.0) <= 1e-12);
    CHECK(v.minCoeff() >= 0.0);
  }
  CHECK(partitions_for(2, 12) == 11);
  CHECK_THROWS_AS(das_dennis(1, 3), Error);
}

TEST_CASE("NSGA-III survival") {
  const auto dirs = das_dennis(2, 11);
  std::vector<ObjectivePoint> exact;
  for (int i = 0; i < 12; ++i) exact.push_back({i / 11.0, 1 - i / 11.0, 0});
  for (int i = 0; i < 12; ++i) exact.push_back({i / 11.0 + 1, 2 - i / 11.0, 0});
  CHECK(id_set(nsga3_survival(population_of(exact), 12, dirs)) == std::set<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});

  // Two members, one per direction.
  const std::vector<ObjectivePoint> two{{0.0, 1.0, 0}, {1.0, 0.0, 0}, {0.05, 0.98, 0}};
  const auto sel = nsga3_survival(population_of(two), 2, das_dennis(2, 1));
  CHECK(id_set(sel) == std::set<std::size_t>{0, 1});

  Rng rng(38);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = random_front_points(rng, 24);
    CHECK(ids(nsga3_survival(population_of(pts), 12, dirs)) == nsga3_oracle(pts, 12, 11));
    std::vector<ObjectivePoint> layered;
    for (int i = 0; i < 24; ++i) layered.push_back({rng.uniform(), rng.uniform(), 0.0});
    CHECK(ids(nsga3_survival(population_of(layered), 12, dirs)) == nsga3_oracle(layered, 12, 11));
  }
  CHECK_THROWS_AS(nsga3_survival(population_of(two), 2, ReferenceDirections{}), Error);
}

TEST_CASE("U-NSGA-III niched tournament") {
  auto pop = population_of({{0, 0, 0}, {1, 1, 0}});
  Rng rng(39);
  pop[0].niche = pop[1].niche = 3;
  pop[0].rank = 0;
  pop[1].rank = 1;
  for (int i = 0; i < 100; ++i) CHECK(unsga3_tournament(pop, rng) == 0);
  pop[1].rank = 0;
  pop[0].niche_distance = 0.3;
  pop[1].niche_distance = 0.1;
  for (int i = 0; i < 100; ++i) CHECK(unsga3_tournament(pop, rng) == 1);
  pop[1].niche = 4;
  int wins = 0;
  for (int i = 0; i < 10000; ++i) wins += unsga3_tournament(pop, rng) == 0;
  CHECK(std::abs(wins / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("survival keeps every non-dominated point that fits") {
  Rng rng(40);
  RunConfig cfg;
  for (auto alg : {Algorithm::Nsga2, Algorithm::RNsga2, Algorithm::Nsga3, Algorithm::UNsga3}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto pts = oracle::random_points(rng, 24, 0.2);
      const auto front0 = oracle::peel_fronts(pts).front();
      if (front0.size() > 12) continue;
      const auto kept = id_set(survive(alg, population_of(pts), 12, cfg));
      for (std::size_t i : front0) CHECK(kept.count(i) == 1);
    }
  }
}

TEST_CASE("run shape and determinism") {
  const auto problem = two_asset_problem();
  for (auto alg : {Algorithm::Nsga2, Algorithm::RNsga2, Algorithm::Nsga3, Algorithm::UNsga3}) {
    RunConfig cfg;
    cfg.algorithm = alg;
    cfg.pop_size = 4;
    cfg.generations = 1;
    const auto r = run(problem, cfg);
    CHECK(r.hv_trace.size() == 1);
    CHECK(r.populations.back().rows() == 4);
    CHECK(r.exact_evals == 8);

    cfg.pop_size = 12;
    cfg.generations = 30;
    cfg.seed = 99;
    const auto a = run(problem, cfg);
    const auto b = run(problem, cfg);
    CHECK(a.fronts_per_generation == b.fronts_per_generation);
    CHECK(a.hv_trace == b.hv_trace);
    CHECK(a.exact_evals <= 12u * 31u);
    CHECK(a.hv_trace.size() == 30);
    for (std::size_t g = 1; g < a.archive_hv_trace.size(); ++g) CHECK(a.archive_hv_trace[g] >= a.archive_hv_trace[g - 1]);
    for (const auto& p : a.populations) CHECK(((p.array() >= 0).all() && (p.array() <= 1).all()));
    for (double h : a.hv_trace) CHECK(h >= 0.0);
  }
}

TEST_CASE("run starts from a given population") {
  const auto problem = two_asset_problem();
  RunConfig cfg;
  cfg.pop_size = 4;
  cfg.generations = 2;
  RunOptions opt;
  opt.initial_population = Eigen::MatrixXd::Constant(4, 2, 0.5);
  CHECK(run(problem, cfg, opt).initial_population == *opt.initial_population);
  opt.initial_population = Eigen::MatrixXd::Constant(3, 2, 0.5);
  CHECK_THROWS_AS(run(problem, cfg, opt), Error);
}

TEST_CASE("run config validation") {
  RunConfig cfg;
  cfg.pop_size = 5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.pop_size = 2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.pop_size = 12;
  cfg.generations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_algorithm("unsga3") == Algorithm::UNsga3);
  CHECK_FALSE(parse_algorithm("moead"));
}
