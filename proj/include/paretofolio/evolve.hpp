#pragma once

#include "paretofolio/indicators.hpp"
#include "paretofolio/portfolio.hpp"
#include "paretofolio/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace paretofolio {

enum class EvalKind { Exact, Surrogate };

struct Genome {
  Eigen::VectorXd genes;  // in [0,1]^n
  std::optional<ObjectivePoint> objectives;
  int rank = 0;
  double crowding = 0.0;
  int niche = -1;
  double niche_distance = 0.0;
  EvalKind eval_kind = EvalKind::Exact;
};

using Population = std::vector<Genome>;

enum class Algorithm { Nsga2, RNsga2, Nsga3, UNsga3 };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct ReferenceDirections {
  std::vector<Eigen::VectorXd> dirs;
  int partitions = 0;
};

/// Aspiration points in normalized objective space for R-NSGA-II.
struct ReferencePoints {
  std::vector<Eigen::Vector2d> points{Eigen::Vector2d::Zero()};
  double epsilon = 0.01;
};

struct RunConfig {
  int pop_size = 12;
  int generations = 30;
  int runs = 10;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::Nsga2;
  double eta_c = 15.0;
  double prob_c = 0.9;
  double eta_m = 20.0;
  /// Non-positive means 1/n.
  double prob_m = 0.0;
  ReferencePoints ref_points;
  /// NSGA-III partitions; 0 picks the smallest count with |dirs| >= pop_size.
  int partitions = 0;

  void validate() const;
};

/// The black-box problem the optimizers see.
struct Problem {
  Eigen::Index n_vars = 0;
  std::function<ObjectivePoint(const Eigen::VectorXd&)> evaluate;
};

Problem portfolio_problem(const MarketModel& model, const CostSpec& spec);

struct OptimizerRun {
  /// Feasible non-dominated objective points of the population after each generation.
  std::vector<std::vector<ObjectivePoint>> fronts_per_generation;
  /// Population genes after each generation (rows are members).
  std::vector<Eigen::MatrixXd> populations;
  Eigen::MatrixXd initial_population;
  /// Every exact evaluation in order.
  std::vector<ObjectivePoint> archive;
  /// Cumulative exact evaluations at the end of each generation.
  std::vector<std::size_t> evals_at_generation;
  std::size_t initial_evals = 0;
  std::vector<double> hv_trace;
  std::vector<double> archive_hv_trace;
  HVConfig hv_config;
  double wall_time_seconds = 0.0;
  Population final_front;
  std::size_t exact_evals = 0;
  std::vector<std::string> log;
};

/// a constrained-dominates b (minimization of risk and neg_return).
bool constrained_dominates(const ObjectivePoint& a, const ObjectivePoint& b);

std::vector<std::vector<std::size_t>> fast_non_dominated_sort(std::span<const ObjectivePoint> points);
std::vector<double> crowding_distance(std::span<const ObjectivePoint> front);

std::size_t binary_tournament(const Population& pop, Rng& rng);
std::pair<Genome, Genome> sbx_crossover(const Genome& a, const Genome& b, double eta_c, double prob_c,
                                        Rng& rng);
Genome polynomial_mutation(const Genome& g, double eta_m, double prob_m, Rng& rng);

Population nsga2_survival(const Population& merged, std::size_t pop_size);
Population rnsga2_survival(const Population& merged, std::size_t pop_size, const ReferencePoints& refs);

ReferenceDirections das_dennis(int m, int p);
/// Smallest partition count with C(p+m-1, m-1) >= n.
int partitions_for(int m, std::size_t n);

Population nsga3_survival(const Population& merged, std::size_t pop_size, const ReferenceDirections& dirs);
std::size_t unsga3_tournament(const Population& pop, Rng& rng);

/// Applies the host algorithm's survival rule.
Population survive(Algorithm algorithm, const Population& merged, std::size_t pop_size,
                   const RunConfig& config);

/// Produces `count` offspring with the host algorithm's mating selection,
/// SBX and polynomial mutation. Draws from `rng` in a fixed order.
Population make_offspring(Algorithm algorithm, const Population& pop, std::size_t count,
                          const RunConfig& config, Rng& rng);

struct RunOptions {
  /// Start from these genes (rows) instead of a uniform random draw.
  std::optional<Eigen::MatrixXd> initial_population;
  /// Fixed normalization for the HV traces; derived from the run's own
  /// evaluations when absent.
  std::optional<HVConfig> hv;
};

OptimizerRun run(const Problem& problem, const RunConfig& config, const RunOptions& options = {});

/// Feasible rank-0 members of a population.
Population feasible_front(const Population& pop);

/// Recomputes `hv_trace` and `archive_hv_trace` under `hv`.
void compute_hv_traces(OptimizerRun& run, const HVConfig& hv);

}  // namespace paretofolio
