#pragma once

#include "paretofolio/error.hpp"
#include "paretofolio/market_data.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace paretofolio {

using Weights = Eigen::VectorXd;

/// How a genome maps to weights and which constraints apply.
enum class WeightMode {
  /// Long-only, fully invested: sum w = 1, 0 <= w <= 1.
  Simplex,
  /// Genes map to [-l_max, l_max]; only the leverage cap applies.
  Leveraged,
};

struct CostSpec {
  double gamma = 1.0;
  double gamma_t = 1.0;
  double gamma_h = 1.0;
  Weights w0;
  Eigen::VectorXd trade_rate;   // per unit traded
  Eigen::VectorXd borrow_rate;  // per unit short
  double l_max = 1.0;
  WeightMode mode = WeightMode::Simplex;

  /// Equal-weight initial portfolio with uniform rates.
  static CostSpec uniform(Eigen::Index n, double trade = 0.001, double borrow = 0.0005);
  /// Zero rates and zero trade-offs.
  static CostSpec zero(Eigen::Index n);

  void validate(Eigen::Index n) const;
};

struct ObjectivePoint {
  double risk = 0.0;        // w' Sigma w
  double neg_return = 0.0;  // -(cost-adjusted return)
  double cv = 0.0;          // constraint violation, 0 iff feasible

  bool feasible() const { return cv == 0.0; }
  friend bool operator==(const ObjectivePoint&, const ObjectivePoint&) = default;
};

struct Feasibility {
  bool feasible = true;
  double cv = 0.0;
};

namespace detail {
inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  }
}
}  // namespace detail

template <typename DW, typename DS>
typename DW::Scalar portfolio_variance(const Eigen::MatrixBase<DW>& w, const Eigen::MatrixBase<DS>& sigma) {
  detail::require_same_size(w.size(), sigma.rows(), "portfolio_variance");
  detail::require_same_size(sigma.rows(), sigma.cols(), "portfolio_variance");
  return w.dot(sigma * w);
}

template <typename DW, typename DM>
typename DW::Scalar portfolio_return(const Eigen::MatrixBase<DW>& w, const Eigen::MatrixBase<DM>& mu) {
  detail::require_same_size(w.size(), mu.size(), "portfolio_return");
  return w.dot(mu);
}

/// Sum |w_i|.
template <typename DW>
typename DW::Scalar leverage(const Eigen::MatrixBase<DW>& w) {
  return w.template lpNorm<1>();
}

/// Proportional trading cost sum c_i |w_i - w0_i|.
template <typename DW>
typename DW::Scalar trade_cost(const Eigen::MatrixBase<DW>& w, const CostSpec& spec) {
  detail::require_same_size(w.size(), spec.w0.size(), "trade_cost");
  detail::require_same_size(w.size(), spec.trade_rate.size(), "trade_cost");
  return spec.trade_rate.dot((w - spec.w0).cwiseAbs());
}

/// Short-borrow cost sum s_i max(-w_i, 0).
template <typename DW>
typename DW::Scalar holding_cost(const Eigen::MatrixBase<DW>& w, const CostSpec& spec) {
  detail::require_same_size(w.size(), spec.borrow_rate.size(), "holding_cost");
  return spec.borrow_rate.dot((-w).cwiseMax(typename DW::Scalar(0)));
}

/// w'mu - gamma/2 w'Sigma w - gamma_t trade - gamma_h hold.
template <typename DW>
typename DW::Scalar utility(const Eigen::MatrixBase<DW>& w, const MarketModel& model, const CostSpec& spec) {
  return portfolio_return(w, model.mu) - 0.5 * spec.gamma * portfolio_variance(w, model.sigma) -
         spec.gamma_t * trade_cost(w, spec) - spec.gamma_h * holding_cost(w, spec);
}

Feasibility is_feasible(const Eigen::Ref<const Weights>& w, const CostSpec& spec);

/// Per-period Sharpe ratio (w.mu - rf) / sqrt(w' Sigma w). Throws ZeroVolatility.
double sharpe_ratio(const Eigen::Ref<const Weights>& w, const MarketModel& model);
double annualized_sharpe(const Eigen::Ref<const Weights>& w, const MarketModel& model,
                         double periods_per_year = 252.0);

/// Clips negatives, rescales to unit sum; all-zero input maps to equal
/// weights. The sequential sum of the result is exactly 1.
Weights repair_to_simplex(const Eigen::Ref<const Eigen::VectorXd>& raw);

/// Genome in [0,1]^n to weights, according to the spec's mode.
Weights decode(const Eigen::Ref<const Eigen::VectorXd>& genes, const CostSpec& spec);

ObjectivePoint evaluate(const Eigen::Ref<const Eigen::VectorXd>& genes, const MarketModel& model,
                        const CostSpec& spec);

struct TangencyOptions {
  int starts = 64;
  int iterations = 500;
  std::uint64_t seed = 0x5eed;
  /// Extra starting points (e.g. weights from an optimizer's final front).
  std::vector<Weights> warm_starts;
};

/// Long-only maximizer of sharpe(w) - gamma_l2 ||w||^2 by projected
/// multi-start gradient ascent.
Weights tangency_weights_for_gamma(const MarketModel& model, double gamma_l2,
                                   const TangencyOptions& options = {});

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace paretofolio
