#include "paretofolio/evolve.hpp"

#include "paretofolio/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace paretofolio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool pareto_dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  return a.risk <= b.risk && a.neg_return <= b.neg_return &&
         (a.risk < b.risk || a.neg_return < b.neg_return);
}

std::vector<ObjectivePoint> objectives_of(const Population& pop) {
  std::vector<ObjectivePoint> out;
  out.reserve(pop.size());
  for (const auto& g : pop) {
    if (!g.objectives) throw Error(ErrorCode::UnevaluatedPoint, "population member has no objectives");
    out.push_back(*g.objectives);
  }
  return out;
}

Eigen::Vector2d as_vector(const ObjectivePoint& p) { return {p.risk, p.neg_return}; }

double perpendicular_distance(const Eigen::VectorXd& f, const Eigen::VectorXd& dir) {
  const double scale = f.dot(dir) / dir.squaredNorm();
  return (f - scale * dir).norm();
}

void require_population(const Population& merged, std::size_t pop_size) {
  if (merged.size() < pop_size) {
    throw Error(ErrorCode::PopulationTooSmall,
                fmt::format("survival: {} candidates for {} slots", merged.size(), pop_size));
  }
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Nsga2: return "nsga2";
    case Algorithm::RNsga2: return "rnsga2";
    case Algorithm::Nsga3: return "nsga3";
    case Algorithm::UNsga3: return "unsga3";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  for (auto a : {Algorithm::Nsga2, Algorithm::RNsga2, Algorithm::Nsga3, Algorithm::UNsga3}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

void RunConfig::validate() const {
  if (pop_size < 4 || pop_size % 2 != 0) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("pop_size must be even and >= 4, got {}", pop_size));
  }
  if (generations < 1) throw Error(ErrorCode::InvalidConfig, "generations must be >= 1");
  if (runs < 1) throw Error(ErrorCode::InvalidConfig, "runs must be >= 1");
  if (eta_c < 0 || eta_m < 0 || prob_c < 0 || prob_c > 1 || prob_m > 1) {
    throw Error(ErrorCode::InvalidConfig, "invalid variation operator parameters");
  }
  if (algorithm == Algorithm::RNsga2) {
    if (ref_points.points.empty()) throw Error(ErrorCode::NoReferencePoints, "R-NSGA-II needs reference points");
    if (!(ref_points.epsilon > 0)) throw Error(ErrorCode::InvalidConfig, "R-NSGA-II epsilon must be > 0");
  }
}

Problem portfolio_problem(const MarketModel& model, const CostSpec& spec) {
  spec.validate(model.size());
  return Problem{model.size(), [model, spec](const Eigen::VectorXd& genes) { return evaluate(genes, model, spec); }};
}

bool constrained_dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  if (a.cv < b.cv) return true;
  if (a.cv == b.cv) return pareto_dominates(a, b);
  return false;
}

std::vector<std::vector<std::size_t>> fast_non_dominated_sort(std::span<const ObjectivePoint> points) {
  const std::size_t n = points.size();
  for (const auto& p : points) {
    if (std::isnan(p.risk) || std::isnan(p.neg_return) || std::isnan(p.cv)) {
      throw Error(ErrorCode::UnevaluatedPoint, "fast_non_dominated_sort: NaN objective");
    }
  }
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> counter(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (constrained_dominates(points[i], points[j])) {
        dominated[i].push_back(j);
        ++counter[j];
      } else if (constrained_dominates(points[j], points[i])) {
        dominated[j].push_back(i);
        ++counter[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (counter[i] == 0) fronts[0].push_back(i);
  }
  while (!fronts.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : fronts.back()) {
      for (std::size_t j : dominated[i]) {
        if (--counter[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectivePoint> front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n <= 2) {
    std::fill(distance.begin(), distance.end(), kInf);
    return distance;
  }
  for (int axis = 0; axis < 2; ++axis) {
    auto value = [&](std::size_t i) { return axis == 0 ? front[i].risk : front[i].neg_return; };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    const double range = value(order.back()) - value(order.front());
    if (!(range > 0.0)) continue;
    distance[order.front()] = kInf;
    distance[order.back()] = kInf;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      distance[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / range;
    }
  }
  return distance;
}

std::size_t binary_tournament(const Population& pop, Rng& rng) {
  const std::size_t n = pop.size();
  if (n == 1) return 0;
  const std::size_t a = rng.uniform_index(n);
  std::size_t b = rng.uniform_index(n - 1);
  if (b >= a) ++b;
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? a : b;
  if (pop[a].crowding != pop[b].crowding) return pop[a].crowding > pop[b].crowding ? a : b;
  return rng.coin() ? a : b;
}

std::pair<Genome, Genome> sbx_crossover(const Genome& a, const Genome& b, double eta_c, double prob_c,
                                        Rng& rng) {
  if (a.genes.size() != b.genes.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sbx_crossover: parents differ in length");
  }
  Genome c1{a.genes, std::nullopt};
  Genome c2{b.genes, std::nullopt};
  const double exponent = 1.0 / (eta_c + 1.0);
  for (Eigen::Index i = 0; i < a.genes.size(); ++i) {
    if (rng.uniform() >= prob_c) continue;
    const double u = rng.uniform();
    const double y1 = std::min(a.genes(i), b.genes(i));
    const double y2 = std::max(a.genes(i), b.genes(i));
    if (y2 - y1 < 1e-14) continue;
    const double span = y2 - y1;

    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta_c + 1.0));
      return u <= 1.0 / alpha ? std::pow(u * alpha, exponent) : std::pow(1.0 / (2.0 - u * alpha), exponent);
    };
    const double lower = 0.5 * ((y1 + y2) - spread(1.0 + 2.0 * y1 / span) * span);
    const double upper = 0.5 * ((y1 + y2) + spread(1.0 + 2.0 * (1.0 - y2) / span) * span);
    const double lo = std::clamp(lower, 0.0, 1.0);
    const double hi = std::clamp(upper, 0.0, 1.0);
    if (a.genes(i) <= b.genes(i)) {
      c1.genes(i) = lo;
      c2.genes(i) = hi;
    } else {
      c1.genes(i) = hi;
      c2.genes(i) = lo;
    }
  }
  return {std::move(c1), std::move(c2)};
}

Genome polynomial_mutation(const Genome& g, double eta_m, double prob_m, Rng& rng) {
  Genome out{g.genes, std::nullopt};
  const double power = 1.0 / (eta_m + 1.0);
  for (Eigen::Index i = 0; i < out.genes.size(); ++i) {
    if (rng.uniform() >= prob_m) continue;
    const double y = out.genes(i);
    const double u = rng.uniform();
    double delta = 0.0;
    if (u < 0.5) {
      const double xy = 1.0 - y;
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta_m + 1.0);
      delta = std::pow(val, power) - 1.0;
    } else {
      const double xy = y;  // 1 - distance to the upper bound
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta_m + 1.0);
      delta = 1.0 - std::pow(val, power);
    }
    out.genes(i) = std::clamp(y + delta, 0.0, 1.0);
  }
  return out;
}

Population nsga2_survival(const Population& merged, std::size_t pop_size) {
  require_population(merged, pop_size);
  const auto points = objectives_of(merged);
  const auto fronts = fast_non_dominated_sort(points);
  Population out;
  out.reserve(pop_size);
  for (std::size_t r = 0; r < fronts.size() && out.size() < pop_size; ++r) {
    const auto& front = fronts[r];
    std::vector<ObjectivePoint> front_points;
    for (std::size_t i : front) front_points.push_back(points[i]);
    const auto crowd = crowding_distance(front_points);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    if (out.size() + front.size() > pop_size) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      order.resize(pop_size - out.size());
    }
    for (std::size_t k : order) {
      Genome g = merged[front[k]];
      g.rank = static_cast<int>(r);
      g.crowding = crowd[k];
      out.push_back(std::move(g));
    }
  }
  return out;
}

Population rnsga2_survival(const Population& merged, std::size_t pop_size, const ReferencePoints& refs) {
  if (refs.points.empty()) throw Error(ErrorCode::NoReferencePoints, "rnsga2_survival: no reference points");
  require_population(merged, pop_size);
  const auto points = objectives_of(merged);
  const auto fronts = fast_non_dominated_sort(points);

  const ObjectiveBounds bounds = bounds_from(points);
  const Eigen::Vector2d width = bounds.nadir - bounds.ideal;
  std::vector<Eigen::Vector2d> normalized;
  std::vector<double> ref_distance;
  for (const auto& p : points) {
    const Eigen::Vector2d z = ((as_vector(p) - bounds.ideal).array() / width.array()).matrix();
    double best = kInf;
    for (const auto& r : refs.points) best = std::min(best, (z - r).norm());
    normalized.push_back(z);
    ref_distance.push_back(best);
  }

  Population out;
  out.reserve(pop_size);
  for (std::size_t r = 0; r < fronts.size() && out.size() < pop_size; ++r) {
    const auto& front = fronts[r];
    std::vector<std::size_t> order = front;
    if (out.size() + front.size() > pop_size) {
      std::vector<std::size_t> by_distance = front;
      std::stable_sort(by_distance.begin(), by_distance.end(),
                       [&](std::size_t a, std::size_t b) { return ref_distance[a] < ref_distance[b]; });
      // Epsilon clustering: once a member is taken, its close neighbours
      // wait until every non-clustered member has been taken.
      order.clear();
      std::vector<bool> taken(by_distance.size(), false), demoted(by_distance.size(), false);
      while (order.size() < by_distance.size()) {
        std::size_t pick = by_distance.size();
        for (std::size_t k = 0; k < by_distance.size(); ++k) {
          if (!taken[k] && !demoted[k]) {
            pick = k;
            break;
          }
        }
        if (pick == by_distance.size()) {
          std::fill(demoted.begin(), demoted.end(), false);
          continue;
        }
        taken[pick] = true;
        order.push_back(by_distance[pick]);
        for (std::size_t k = 0; k < by_distance.size(); ++k) {
          if (!taken[k] && (normalized[by_distance[k]] - normalized[by_distance[pick]]).norm() <= refs.epsilon) {
            demoted[k] = true;
          }
        }
      }
      order.resize(pop_size - out.size());
    }
    for (std::size_t i : order) {
      Genome g = merged[i];
      g.rank = static_cast<int>(r);
      g.crowding = -ref_distance[i];
      out.push_back(std::move(g));
    }
  }
  return out;
}

ReferenceDirections das_dennis(int m, int p) {
  if (m < 2 || p < 1) throw Error(ErrorCode::InvalidConfig, "das_dennis: need m >= 2 and p >= 1");
  ReferenceDirections out;
  out.partitions = p;
  std::vector<int> parts(static_cast<std::size_t>(m), 0);
  std::function<void(int, int)> fill = [&](int axis, int left) {
    if (axis == m - 1) {
      parts[static_cast<std::size_t>(axis)] = left;
      Eigen::VectorXd dir(m);
      for (int j = 0; j < m; ++j) dir(j) = static_cast<double>(parts[static_cast<std::size_t>(j)]) / p;
      out.dirs.push_back(dir);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      parts[static_cast<std::size_t>(axis)] = k;
      fill(axis + 1, left - k);
    }
  };
  fill(0, p);
  return out;
}

int partitions_for(int m, std::size_t n) {
  auto count = [m](int p) {
    // C(p + m - 1, m - 1)
    double c = 1.0;
    for (int i = 1; i < m; ++i) c = c * (p + i) / i;
    return static_cast<std::size_t>(std::llround(c));
  };
  int p = 1;
  while (count(p) < n) ++p;
  return p;
}

Population nsga3_survival(const Population& merged, std::size_t pop_size, const ReferenceDirections& dirs) {
  if (dirs.dirs.empty()) throw Error(ErrorCode::NoDirections, "nsga3_survival: no reference directions");
  require_population(merged, pop_size);
  const auto points = objectives_of(merged);
  const auto fronts = fast_non_dominated_sort(points);

  std::vector<std::size_t> chosen;  // indices into merged, whole fronts
  std::size_t last = 0;
  for (; last < fronts.size(); ++last) {
    if (chosen.size() + fronts[last].size() > pop_size) break;
    chosen.insert(chosen.end(), fronts[last].begin(), fronts[last].end());
    if (chosen.size() == pop_size) break;
  }
  const bool split = chosen.size() < pop_size;
  std::vector<std::size_t> pool = chosen;
  if (split) pool.insert(pool.end(), fronts[last].begin(), fronts[last].end());

  std::vector<int> rank_of(merged.size(), -1);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    for (std::size_t i : fronts[r]) rank_of[i] = static_cast<int>(r);
  }

  // Normalize the candidate set: translate by the ideal point, divide by
  // hyperplane intercepts through the extreme points.
  constexpr int m = 2;
  Eigen::MatrixXd f(static_cast<Eigen::Index>(pool.size()), m);
  for (std::size_t k = 0; k < pool.size(); ++k) f.row(static_cast<Eigen::Index>(k)) = as_vector(points[pool[k]]);
  const Eigen::RowVectorXd ideal = f.colwise().minCoeff();
  f.rowwise() -= ideal;

  Eigen::MatrixXd extremes(m, m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1e-6);
    w(j) = 1.0;
    Eigen::Index best = 0;
    double best_asf = kInf;
    for (Eigen::Index k = 0; k < f.rows(); ++k) {
      const double asf = (f.row(k).transpose().array() / w.array()).maxCoeff();
      if (asf < best_asf) {
        best_asf = asf;
        best = k;
      }
    }
    extremes.row(j) = f.row(best);
  }
  const Eigen::RowVectorXd worst = f.colwise().maxCoeff();
  Eigen::VectorXd intercepts(m);
  bool degenerate = true;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(extremes);
  if (lu.isInvertible()) {
    const Eigen::VectorXd b = lu.solve(Eigen::VectorXd::Ones(m));
    intercepts = b.cwiseInverse();
    degenerate = !intercepts.allFinite() || (intercepts.array() <= 1e-6).any();
  }
  if (degenerate) intercepts = worst.transpose();
  for (int j = 0; j < m; ++j) {
    if (intercepts(j) > 1e-12) {
      f.col(j) /= intercepts(j);
    } else {
      f.col(j).setZero();
    }
  }

  std::vector<int> niche(pool.size(), 0);
  std::vector<double> dist(pool.size(), kInf);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const Eigen::VectorXd fk = f.row(static_cast<Eigen::Index>(k)).transpose();
    for (std::size_t d = 0; d < dirs.dirs.size(); ++d) {
      const double pd = perpendicular_distance(fk, dirs.dirs[d]);
      if (pd < dist[k]) {
        dist[k] = pd;
        niche[k] = static_cast<int>(d);
      }
    }
  }

  auto annotate = [&](std::size_t k) {
    Genome g = merged[pool[k]];
    g.rank = rank_of[pool[k]];
    g.crowding = 0.0;
    g.niche = niche[k];
    g.niche_distance = dist[k];
    return g;
  };

  Population out;
  out.reserve(pop_size);
  std::vector<std::size_t> niche_count(dirs.dirs.size(), 0);
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    out.push_back(annotate(k));
    ++niche_count[static_cast<std::size_t>(niche[k])];
  }
  if (!split) return out;

  std::vector<bool> used(pool.size(), false);
  std::vector<bool> excluded(dirs.dirs.size(), false);
  while (out.size() < pop_size) {
    std::size_t dir = dirs.dirs.size();
    for (std::size_t d = 0; d < dirs.dirs.size(); ++d) {
      if (!excluded[d] && (dir == dirs.dirs.size() || niche_count[d] < niche_count[dir])) dir = d;
    }
    std::size_t pick = pool.size();
    for (std::size_t k = chosen.size(); k < pool.size(); ++k) {
      if (used[k] || niche[k] != static_cast<int>(dir)) continue;
      if (pick == pool.size() || dist[k] < dist[pick]) pick = k;
    }
    if (pick == pool.size()) {
      excluded[dir] = true;
      continue;
    }
    used[pick] = true;
    ++niche_count[dir];
    out.push_back(annotate(pick));
  }
  return out;
}

std::size_t unsga3_tournament(const Population& pop, Rng& rng) {
  const std::size_t n = pop.size();
  if (n == 1) return 0;
  const std::size_t a = rng.uniform_index(n);
  std::size_t b = rng.uniform_index(n - 1);
  if (b >= a) ++b;
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? a : b;
  if (pop[a].niche == pop[b].niche && pop[a].niche_distance != pop[b].niche_distance) {
    return pop[a].niche_distance < pop[b].niche_distance ? a : b;
  }
  return rng.coin() ? a : b;
}

Population survive(Algorithm algorithm, const Population& merged, std::size_t pop_size, const RunConfig& config) {
  switch (algorithm) {
    case Algorithm::Nsga2: return nsga2_survival(merged, pop_size);
    case Algorithm::RNsga2: return rnsga2_survival(merged, pop_size, config.ref_points);
    case Algorithm::Nsga3:
    case Algorithm::UNsga3: {
      const int p = config.partitions > 0 ? config.partitions
                                          : partitions_for(2, static_cast<std::size_t>(config.pop_size));
      return nsga3_survival(merged, pop_size, das_dennis(2, p));
    }
  }
  return nsga2_survival(merged, pop_size);
}

Population make_offspring(Algorithm algorithm, const Population& pop, std::size_t count, const RunConfig& config,
                          Rng& rng) {
  const Eigen::Index n_vars = pop.front().genes.size();
  const double prob_m = config.prob_m > 0.0 ? config.prob_m : 1.0 / static_cast<double>(n_vars);
  auto select = [&]() -> std::size_t {
    switch (algorithm) {
      case Algorithm::Nsga2:
      case Algorithm::RNsga2: return binary_tournament(pop, rng);
      case Algorithm::Nsga3: return rng.uniform_index(pop.size());
      case Algorithm::UNsga3: return unsga3_tournament(pop, rng);
    }
    return 0;
  };
  Population out;
  out.reserve(count + 1);
  while (out.size() < count) {
    const std::size_t a = select();
    const std::size_t b = select();
    auto [c1, c2] = sbx_crossover(pop[a], pop[b], config.eta_c, config.prob_c, rng);
    out.push_back(polynomial_mutation(c1, config.eta_m, prob_m, rng));
    Genome second = polynomial_mutation(c2, config.eta_m, prob_m, rng);
    if (out.size() < count) out.push_back(std::move(second));
  }
  return out;
}

Population feasible_front(const Population& pop) {
  Population feasible;
  for (const auto& g : pop) {
    if (g.objectives && g.objectives->feasible()) feasible.push_back(g);
  }
  if (feasible.empty()) return feasible;
  const auto fronts = fast_non_dominated_sort(objectives_of(feasible));
  Population out;
  for (std::size_t i : fronts.front()) out.push_back(feasible[i]);
  return out;
}

void compute_hv_traces(OptimizerRun& run, const HVConfig& hv) {
  run.hv_config = hv;
  run.hv_trace.clear();
  run.archive_hv_trace.clear();
  for (std::size_t g = 0; g < run.fronts_per_generation.size(); ++g) {
    run.hv_trace.push_back(normalized_hypervolume(run.fronts_per_generation[g], hv));
    const std::span<const ObjectivePoint> seen(run.archive.data(), run.evals_at_generation[g]);
    run.archive_hv_trace.push_back(normalized_hypervolume(seen, hv));
  }
}

OptimizerRun run(const Problem& problem, const RunConfig& config, const RunOptions& options) {
  config.validate();
  if (problem.n_vars < 1 || !problem.evaluate) throw Error(ErrorCode::InvalidConfig, "run: empty problem");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t pop_size = static_cast<std::size_t>(config.pop_size);
  Rng rng(config.seed);
  OptimizerRun result;

  auto evaluate_all = [&](Population& members) {
    for (auto& g : members) {
      g.objectives = problem.evaluate(g.genes);
      g.eval_kind = EvalKind::Exact;
      result.archive.push_back(*g.objectives);
      ++result.exact_evals;
    }
  };

  Population pop;
  if (options.initial_population) {
    const auto& init = *options.initial_population;
    if (init.cols() != problem.n_vars || static_cast<std::size_t>(init.rows()) != pop_size) {
      throw Error(ErrorCode::DimensionMismatch, "run: initial population has the wrong shape");
    }
    for (Eigen::Index r = 0; r < init.rows(); ++r) {
      Genome g;
      g.genes = init.row(r).transpose();
      pop.push_back(std::move(g));
    }
  } else {
    for (std::size_t i = 0; i < pop_size; ++i) {
      Genome g;
      g.genes.resize(problem.n_vars);
      for (Eigen::Index j = 0; j < problem.n_vars; ++j) g.genes(j) = rng.uniform();
      pop.push_back(std::move(g));
    }
  }
  result.initial_population.resize(static_cast<Eigen::Index>(pop_size), problem.n_vars);
  for (std::size_t i = 0; i < pop_size; ++i) result.initial_population.row(static_cast<Eigen::Index>(i)) = pop[i].genes;
  evaluate_all(pop);
  result.initial_evals = result.exact_evals;
  pop = survive(config.algorithm, pop, pop_size, config);

  for (int gen = 0; gen < config.generations; ++gen) {
    Population offspring = make_offspring(config.algorithm, pop, pop_size, config, rng);
    evaluate_all(offspring);
    Population merged = pop;
    merged.insert(merged.end(), offspring.begin(), offspring.end());
    pop = survive(config.algorithm, merged, pop_size, config);

    std::vector<ObjectivePoint> front;
    for (const auto& g : feasible_front(pop)) front.push_back(*g.objectives);
    result.fronts_per_generation.push_back(std::move(front));
    Eigen::MatrixXd genes(static_cast<Eigen::Index>(pop.size()), problem.n_vars);
    for (std::size_t i = 0; i < pop.size(); ++i) genes.row(static_cast<Eigen::Index>(i)) = pop[i].genes;
    result.populations.push_back(std::move(genes));
    result.evals_at_generation.push_back(result.exact_evals);
  }

  result.final_front = feasible_front(pop);
  result.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  HVConfig hv = options.hv.value_or(HVConfig{});
  if (!hv.bounds) hv.bounds = bounds_from(result.archive);
  compute_hv_traces(result, hv);
  return result;
}

}  // namespace paretofolio
