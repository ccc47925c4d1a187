#include "paretofolio/portfolio.hpp"

#include "paretofolio/rng.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace paretofolio {

namespace {

// Violations below this are rounding noise from the decode step.
constexpr double kCvTolerance = 1e-12;

}  // namespace

CostSpec CostSpec::uniform(Eigen::Index n, double trade, double borrow) {
  CostSpec spec;
  spec.w0 = Weights::Constant(n, 1.0 / static_cast<double>(n));
  spec.trade_rate = Eigen::VectorXd::Constant(n, trade);
  spec.borrow_rate = Eigen::VectorXd::Constant(n, borrow);
  return spec;
}

CostSpec CostSpec::zero(Eigen::Index n) {
  CostSpec spec = uniform(n, 0.0, 0.0);
  spec.gamma = spec.gamma_t = spec.gamma_h = 0.0;
  return spec;
}

void CostSpec::validate(Eigen::Index n) const {
  detail::require_same_size(w0.size(), n, "CostSpec.w0");
  detail::require_same_size(trade_rate.size(), n, "CostSpec.trade_rate");
  detail::require_same_size(borrow_rate.size(), n, "CostSpec.borrow_rate");
  if (gamma_t < 0 || gamma_h < 0 || l_max < 0 || (trade_rate.array() < 0).any() ||
      (borrow_rate.array() < 0).any()) {
    throw Error(ErrorCode::InvalidConfig, "CostSpec: rates, trade-offs and l_max must be >= 0");
  }
}

Feasibility is_feasible(const Eigen::Ref<const Weights>& w, const CostSpec& spec) {
  double cv = std::max(0.0, leverage(w) - spec.l_max);
  if (spec.mode == WeightMode::Simplex) cv += std::abs(w.sum() - 1.0);
  if (cv <= kCvTolerance) cv = 0.0;
  return {cv == 0.0, cv};
}

double sharpe_ratio(const Eigen::Ref<const Weights>& w, const MarketModel& model) {
  const double var = portfolio_variance(w, model.sigma);
  if (!(var > 0.0)) throw Error(ErrorCode::ZeroVolatility, "sharpe_ratio: portfolio variance is zero");
  return (portfolio_return(w, model.mu) - model.rf) / std::sqrt(var);
}

double annualized_sharpe(const Eigen::Ref<const Weights>& w, const MarketModel& model,
                         double periods_per_year) {
  return sharpe_ratio(w, model) * std::sqrt(periods_per_year);
}

Weights repair_to_simplex(const Eigen::Ref<const Eigen::VectorXd>& raw) {
  const Eigen::Index n = raw.size();
  Weights w = raw.cwiseMax(0.0);
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    w = Weights::Constant(n, 1.0 / static_cast<double>(n));
  } else {
    w /= total;
  }
  // The last positive entry absorbs rounding so the running sum is exactly 1.
  Eigen::Index last = n - 1;
  while (last > 0 && w(last) == 0.0) --last;
  double head = 0.0;
  for (Eigen::Index i = 0; i < last; ++i) head += w(i);
  double tail = std::max(1.0 - head, 0.0);
  for (int step = 0; step < 8 && head + tail != 1.0; ++step) {
    tail = std::nextafter(tail, head + tail < 1.0 ? 2.0 : 0.0);
  }
  w(last) = tail;
  for (Eigen::Index i = last + 1; i < n; ++i) w(i) = 0.0;
  return w;
}

Weights decode(const Eigen::Ref<const Eigen::VectorXd>& genes, const CostSpec& spec) {
  if (spec.mode == WeightMode::Simplex) return repair_to_simplex(genes);
  return (spec.l_max * (2.0 * genes.array() - 1.0)).matrix();
}

ObjectivePoint evaluate(const Eigen::Ref<const Eigen::VectorXd>& genes, const MarketModel& model,
                        const CostSpec& spec) {
  detail::require_same_size(genes.size(), model.size(), "evaluate");
  const Weights w = decode(genes, spec);
  ObjectivePoint point;
  point.risk = portfolio_variance(w, model.sigma);
  point.neg_return = -(portfolio_return(w, model.mu) - spec.gamma_t * trade_cost(w, spec) -
                       spec.gamma_h * holding_cost(w, spec));
  point.cv = is_feasible(w, spec).cv;
  return point;
}

Eigen::VectorXd project_to_simplex(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  return repair_to_simplex((v.array() - theta).cwiseMax(0.0).matrix());
}

Weights tangency_weights_for_gamma(const MarketModel& model, double gamma_l2,
                                   const TangencyOptions& options) {
  const Eigen::Index n = model.size();
  detail::require_same_size(model.sigma.rows(), n, "tangency_weights_for_gamma");
  if (gamma_l2 < 0.0) throw Error(ErrorCode::InvalidConfig, "tangency: gamma_l2 must be >= 0");
  if (n == 1) return Weights::Ones(1);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto objective = [&](const Weights& w) {
    const double var = w.dot(model.sigma * w);
    if (!(var > 0.0)) return nan;
    return (w.dot(model.mu) - model.rf) / std::sqrt(var) - gamma_l2 * w.squaredNorm();
  };
  auto gradient = [&](const Weights& w) -> Eigen::VectorXd {
    const Eigen::VectorXd sw = model.sigma * w;
    const double var = w.dot(sw);
    const double sd = std::sqrt(var);
    const double excess = w.dot(model.mu) - model.rf;
    return model.mu / sd - excess * sw / (var * sd) - 2.0 * gamma_l2 * w;
  };

  std::vector<Weights> starts = options.warm_starts;
  starts.push_back(Weights::Constant(n, 1.0 / static_cast<double>(n)));
  for (Eigen::Index i = 0; i < n; ++i) starts.push_back(Weights::Unit(n, i));
  Rng rng(options.seed);
  for (int s = 0; s < options.starts; ++s) {
    Eigen::VectorXd raw(n);
    // Exponential spacings give a uniform draw on the simplex.
    for (Eigen::Index i = 0; i < n; ++i) raw(i) = -std::log(1.0 - rng.uniform());
    starts.push_back(repair_to_simplex(raw));
  }

  Weights best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Weights& start : starts) {
    if (start.size() != n) continue;
    Weights w = project_to_simplex(start);
    double value = objective(w);
    if (std::isnan(value)) continue;
    double step = 1.0;
    for (int it = 0; it < options.iterations; ++it) {
      const Eigen::VectorXd g = gradient(w);
      const double gnorm = g.cwiseAbs().maxCoeff();
      if (!(gnorm > 0.0)) break;
      double t = std::min(step * 2.0, 1.0 / gnorm);
      bool accepted = false;
      while (t * gnorm > 1e-16) {
        const Weights candidate = project_to_simplex(w + t * g);
        const double cv = objective(candidate);
        if (!std::isnan(cv) && cv >= value + 1e-4 * g.dot(candidate - w) && cv >= value) {
          const bool moved = (candidate - w).cwiseAbs().maxCoeff() > 0.0;
          const double gain = cv - value;
          w = candidate;
          value = cv;
          step = t;
          accepted = moved && gain > 1e-15 * std::max(1.0, std::abs(value));
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
    }
    if (value > best_value) {
      best_value = value;
      best = w;
    }
  }
  if (best.size() == 0) throw Error(ErrorCode::SolverFailure, "tangency: no start had positive variance");
  return best;
}

}  // namespace paretofolio
