#include "paretofolio/surrogate.hpp"

#include "paretofolio/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

namespace paretofolio {

namespace {

Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b) {
  const Eigen::VectorXd na = a.rowwise().squaredNorm();
  const Eigen::VectorXd nb = b.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * a * b.transpose()).colwise() + na;
  d.rowwise() += nb.transpose();
  return d.cwiseMax(0.0);
}

// Jitter levels as fractions of the signal variance.
constexpr double kJitters[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

bool factorize(GPModel& model, const Eigen::MatrixXd& sq_dist, const Eigen::VectorXd& centered) {
  const Eigen::Index n = sq_dist.rows();
  const Eigen::MatrixXd k = model.signal_var * (-sq_dist / (2.0 * model.length_scale * model.length_scale)).array().exp();
  for (double j : kJitters) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += model.noise_var + j * model.signal_var;
    model.factor.compute(a);
    if (model.factor.info() != Eigen::Success) continue;
    const Eigen::MatrixXd& l = model.factor.matrixLLT();
    if (!(l.diagonal().array() > 0.0).all()) continue;
    model.jitter = j * model.signal_var;
    model.weights = model.factor.solve(centered);
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    model.log_marginal_likelihood = -0.5 * centered.dot(model.weights) - 0.5 * log_det -
                                    0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    return std::isfinite(model.log_marginal_likelihood);
  }
  return false;
}

}  // namespace

void SurrogateConfig::validate(int pop_size) const {
  if (alpha < 0 || beta < 1 || n_max_infills < 1 || n_max_doe < pop_size) {
    throw Error(ErrorCode::InvalidConfig,
                fmt::format("surrogate config: need alpha >= 0, beta >= 1, n_max_infills >= 1, "
                            "n_max_doe >= pop_size (got {}, {}, {}, {})",
                            alpha, beta, n_max_infills, n_max_doe));
  }
}

Eigen::MatrixXd latin_hypercube(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw Error(ErrorCode::InvalidConfig, "latin_hypercube: need n >= 1 and d >= 1");
  Rng rng(seed);
  Eigen::MatrixXd out(n, d);
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    for (std::size_t i = strata.size() - 1; i > 0; --i) std::swap(strata[i], strata[rng.uniform_index(i + 1)]);
    for (int i = 0; i < n; ++i) {
      const double v = (strata[static_cast<std::size_t>(i)] + rng.uniform()) / n;
      // Guard the upper stratum edge against rounding up to (k+1)/n.
      out(i, j) = std::min(v, std::nextafter((strata[static_cast<std::size_t>(i)] + 1.0) / n, 0.0));
    }
  }
  return out;
}

double se_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                 double length_scale, double signal_var) {
  return signal_var * std::exp(-(a - b).squaredNorm() / (2.0 * length_scale * length_scale));
}

GPModel gp_fit_fixed(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                     double length_scale, double signal_var, double noise_var) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "gp_fit: x and y differ in length");
  GPModel model;
  model.train_x = x;
  model.train_y = y;
  model.y_mean = y.mean();
  model.length_scale = length_scale;
  model.signal_var = signal_var;
  model.noise_var = noise_var;
  const Eigen::VectorXd centered = y.array() - model.y_mean;
  if (!factorize(model, squared_distances(x, x), centered)) {
    throw Error(ErrorCode::SingularKernel, "gp_fit: kernel matrix not positive definite after jitter");
  }
  return model;
}

GPModel gp_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               const GPFitOptions& options) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "gp_fit: x and y differ in length");
  if (x.rows() < 2) throw Error(ErrorCode::TooFewObservations, "gp_fit: need at least 2 points");
  if (!y.allFinite()) throw Error(ErrorCode::InvalidConfig, "gp_fit: non-finite targets");

  const double mean = y.mean();
  const Eigen::VectorXd centered = y.array() - mean;
  const double var_y = std::max(centered.squaredNorm() / static_cast<double>(y.size()), 1e-12);
  const Eigen::MatrixXd sq_dist = squared_distances(x, x);

  GPModel best;
  bool found = false;
  for (double ls : options.length_scales) {
    for (double scale : options.signal_scales) {
      GPModel candidate;
      candidate.length_scale = ls;
      candidate.signal_var = scale * var_y;
      candidate.noise_var = 1e-6 * var_y + 1e-10;
      candidate.y_mean = mean;
      if (!factorize(candidate, sq_dist, centered)) continue;
      if (!found || candidate.log_marginal_likelihood > best.log_marginal_likelihood) {
        best = std::move(candidate);
        found = true;
      }
    }
  }
  if (!found) throw Error(ErrorCode::SingularKernel, "gp_fit: no hyperparameter setting gave a usable kernel");
  best.train_x = x;
  best.train_y = y;
  return best;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gp_predict_batch(const GPModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.cols() != model.train_x.cols()) throw Error(ErrorCode::DimensionMismatch, "gp_predict: input dimension");
  const Eigen::MatrixXd k_star =
      model.signal_var *
      (-squared_distances(model.train_x, x) / (2.0 * model.length_scale * model.length_scale)).array().exp();
  Eigen::VectorXd mean = (k_star.transpose() * model.weights).array() + model.y_mean;
  const Eigen::MatrixXd v = model.factor.matrixL().solve(k_star);
  Eigen::VectorXd var = (model.signal_var - v.colwise().squaredNorm().array()).cwiseMax(0.0).matrix().transpose();
  return {std::move(mean), std::move(var)};
}

GPPrediction gp_predict(const GPModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto [mean, var] = gp_predict_batch(model, Eigen::MatrixXd(x.transpose()));
  return {mean(0), var(0)};
}

DoeResult doe_initial_population(const Problem& problem, const RunConfig& run_config,
                                 const SurrogateConfig& s_config) {
  const Eigen::MatrixXd design = latin_hypercube(s_config.n_max_doe, static_cast<int>(problem.n_vars), s_config.seed);
  DoeResult doe;
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    Genome g;
    g.genes = design.row(r).transpose();
    g.objectives = problem.evaluate(g.genes);
    g.eval_kind = EvalKind::Exact;
    doe.all.push_back(std::move(g));
  }
  doe.initial = nsga2_survival(doe.all, static_cast<std::size_t>(run_config.pop_size));
  return doe;
}

OptimizerRun surrogate_assisted_run(const Problem& problem, const RunConfig& run_config,
                                    const SurrogateConfig& s_config, const RunOptions& options) {
  run_config.validate();
  s_config.validate(run_config.pop_size);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t pop_size = static_cast<std::size_t>(run_config.pop_size);
  const Algorithm host = run_config.algorithm;
  Rng rng(run_config.seed);
  OptimizerRun result;

  std::vector<Eigen::VectorXd> seen_x;
  auto record = [&](const Genome& g) {
    result.archive.push_back(*g.objectives);
    seen_x.push_back(g.genes);
    ++result.exact_evals;
  };

  const DoeResult doe = doe_initial_population(problem, run_config, s_config);
  for (const auto& g : doe.all) record(g);
  result.initial_evals = result.exact_evals;
  result.initial_population.resize(static_cast<Eigen::Index>(pop_size), problem.n_vars);
  for (std::size_t i = 0; i < pop_size; ++i) {
    result.initial_population.row(static_cast<Eigen::Index>(i)) = doe.initial[i].genes;
  }
  Population pop = survive(host, doe.initial, pop_size, run_config);

  const std::size_t pool_size = static_cast<std::size_t>(s_config.beta) * pop_size;
  const std::size_t n_infills = std::min(static_cast<std::size_t>(s_config.n_max_infills), pool_size);

  for (int gen = 0; gen < run_config.generations; ++gen) {
    Population pool = make_offspring(host, pop, pool_size, run_config, rng);

    if (s_config.alpha > 0 && pool.size() > n_infills) {
      try {
        const Eigen::Index n_seen = static_cast<Eigen::Index>(seen_x.size());
        Eigen::MatrixXd x(n_seen, problem.n_vars);
        Eigen::VectorXd risk(n_seen), ret(n_seen), cv(n_seen);
        for (Eigen::Index i = 0; i < n_seen; ++i) {
          x.row(i) = seen_x[static_cast<std::size_t>(i)];
          const auto& p = result.archive[static_cast<std::size_t>(i)];
          risk(i) = p.risk;
          ret(i) = p.neg_return;
          cv(i) = p.cv;
        }
        const GPModel risk_gp = gp_fit(x, risk);
        const GPModel ret_gp = gp_fit(x, ret);
        const bool any_violation = (cv.array() > 0.0).any();
        const std::optional<GPModel> cv_gp = any_violation ? std::optional<GPModel>(gp_fit(x, cv)) : std::nullopt;

        Eigen::MatrixXd q(static_cast<Eigen::Index>(pool.size()), problem.n_vars);
        for (std::size_t i = 0; i < pool.size(); ++i) q.row(static_cast<Eigen::Index>(i)) = pool[i].genes;
        const auto risk_pred = gp_predict_batch(risk_gp, q).first;
        const auto ret_pred = gp_predict_batch(ret_gp, q).first;
        const Eigen::VectorXd cv_pred =
            cv_gp ? gp_predict_batch(*cv_gp, q).first : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pool.size()));
        for (std::size_t i = 0; i < pool.size(); ++i) {
          const auto k = static_cast<Eigen::Index>(i);
          pool[i].objectives = ObjectivePoint{risk_pred(k), ret_pred(k), cv_pred(k) > 1e-9 ? cv_pred(k) : 0.0};
          pool[i].eval_kind = EvalKind::Surrogate;
        }

        // Each round pits the pool against the current population in
        // surrogate space and keeps a geometrically shrinking share of it.
        const double p0 = static_cast<double>(pool.size());
        for (int round = 1; round <= s_config.alpha; ++round) {
          const double frac = static_cast<double>(round) / s_config.alpha;
          const std::size_t target = std::max(
              n_infills,
              static_cast<std::size_t>(std::llround(p0 * std::pow(static_cast<double>(n_infills) / p0, frac))));
          if (target >= pool.size()) continue;
          Population merged = pop;
          merged.insert(merged.end(), pool.begin(), pool.end());
          const Population kept = survive(host, merged, pop.size() + target, run_config);
          Population next;
          for (const auto& g : kept) {
            if (g.eval_kind == EvalKind::Surrogate && next.size() < target) next.push_back(g);
          }
          pool = std::move(next);
        }
      } catch (const Error& e) {
        result.log.push_back(fmt::format("generation {}: surrogate unavailable ({}), infilling unscreened", gen + 1,
                                         e.what()));
        for (auto& g : pool) {
          g.objectives.reset();
          g.eval_kind = EvalKind::Exact;
        }
      }
    }
    if (pool.size() > n_infills) pool.resize(n_infills);

    for (auto& g : pool) {
      g.objectives = problem.evaluate(g.genes);
      g.eval_kind = EvalKind::Exact;
      g.crowding = 0.0;
      g.rank = 0;
      record(g);
    }
    Population merged = pop;
    merged.insert(merged.end(), pool.begin(), pool.end());
    pop = survive(host, merged, pop_size, run_config);

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
