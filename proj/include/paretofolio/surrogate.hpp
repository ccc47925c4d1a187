#pragma once

#include "paretofolio/evolve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace paretofolio {

/// Zero-mean GP on centered targets with a squared-exponential kernel
/// k(a, b) = signal_var * exp(-|a - b|^2 / (2 length_scale^2)).
struct GPModel {
  Eigen::MatrixXd train_x;  // rows are inputs
  Eigen::VectorXd train_y;
  double y_mean = 0.0;
  double length_scale = 1.0;
  double signal_var = 1.0;
  double noise_var = 1e-10;
  double jitter = 0.0;
  double log_marginal_likelihood = 0.0;
  Eigen::LLT<Eigen::MatrixXd> factor;  // of K + (noise + jitter) I
  Eigen::VectorXd weights;             // (K + noise I)^-1 (y - y_mean)
};

struct GPFitOptions {
  std::vector<double> length_scales{0.05, 0.1, 0.2, 0.5, 1.0};
  /// Multiples of var(y).
  std::vector<double> signal_scales{0.5, 1.0, 2.0};
};

struct GPPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct SurrogateConfig {
  /// Rounds of surrogate-space survival used to shrink the candidate pool.
  int alpha = 2;
  /// Candidate pool size as a multiple of pop_size.
  int beta = 4;
  int n_max_doe = 24;
  int n_max_infills = 6;
  std::uint64_t seed = 7;

  void validate(int pop_size) const;
};

/// n points in [0,1]^d; column j holds one sample in each stratum [k/n, (k+1)/n).
Eigen::MatrixXd latin_hypercube(int n, int d, std::uint64_t seed);

double se_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                 double length_scale, double signal_var);

/// Grid search on the log marginal likelihood. Throws SingularKernel.
GPModel gp_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               const GPFitOptions& options = {});
/// Fits fixed hyperparameters.
GPModel gp_fit_fixed(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                     double length_scale, double signal_var, double noise_var);

GPPrediction gp_predict(const GPModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// Rows of `x` are query points; returns (means, variances).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gp_predict_batch(const GPModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// The DOE phase: Latin-hypercube design evaluated exactly, reduced to
/// pop_size members by constrained rank then crowding.
struct DoeResult {
  Population all;
  Population initial;
};
DoeResult doe_initial_population(const Problem& problem, const RunConfig& run_config, const SurrogateConfig& s_config);

OptimizerRun surrogate_assisted_run(const Problem& problem, const RunConfig& run_config,
                                    const SurrogateConfig& s_config, const RunOptions& options = {});

}  // namespace paretofolio
