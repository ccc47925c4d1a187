#pragma once

#include "paretofolio/portfolio.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

namespace paretofolio {

struct OptimizerRun;

/// Per-objective (ideal, nadir) used to map raw objectives onto [0,1].
struct ObjectiveBounds {
  Eigen::Vector2d ideal = Eigen::Vector2d::Zero();
  Eigen::Vector2d nadir = Eigen::Vector2d::Ones();
};

struct HVConfig {
  Eigen::Vector2d ref_point{1.1, 1.1};
  std::optional<ObjectiveBounds> bounds;
};

struct TraceSummary {
  std::vector<double> mean;
  std::vector<double> std_dev;
  std::vector<double> archive_mean;
  double mean_wall_time_seconds = 0.0;
};

struct NormalizedFront {
  Eigen::MatrixX2d points;
  /// Rows that fell outside [ideal, nadir] and were clipped.
  std::vector<Eigen::Index> clipped;
};

/// Exact 2-D hypervolume of the region dominated by `front` (rows are
/// points, minimization) and bounded by `ref`. Points not strictly better
/// than `ref` on both axes are ignored.
template <typename Derived>
typename Derived::Scalar hypervolume_2d(const Eigen::MatrixBase<Derived>& front,
                                        const Eigen::Matrix<typename Derived::Scalar, 2, 1>& ref) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::ColsAtCompileTime == 2 || Derived::ColsAtCompileTime == Eigen::Dynamic);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < front.rows(); ++i) {
    if (front(i, 0) < ref(0) && front(i, 1) < ref(1)) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (front(a, 0) != front(b, 0)) return front(a, 0) < front(b, 0);
    return front(a, 1) < front(b, 1);
  });
  // Sweep in x; a point counts only if it improves the best y seen so far.
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i : idx) {
    if (kept.empty() || front(i, 1) < front(kept.back(), 1)) kept.push_back(i);
  }
  Scalar hv(0);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Scalar next_x = k + 1 < kept.size() ? front(kept[k + 1], 0) : ref(0);
    hv += (next_x - front(kept[k], 0)) * (ref(1) - front(kept[k], 1));
  }
  return hv;
}

/// Objective pairs (risk, neg_return) as an n x 2 matrix.
Eigen::MatrixX2d to_matrix(std::span<const ObjectivePoint> points);

/// Bounding box of the given points. Throws DegenerateBounds when empty.
ObjectiveBounds bounds_from(std::span<const ObjectivePoint> points);

/// Affine map onto [0,1]^2; out-of-range coordinates are clipped and the
/// row is reported. Throws DegenerateBounds unless nadir > ideal on both axes.
NormalizedFront normalize_front(const Eigen::Ref<const Eigen::MatrixX2d>& points, const ObjectiveBounds& bounds);

/// HV of the feasible points after normalization.
double normalized_hypervolume(std::span<const ObjectivePoint> points, const HVConfig& hv);

TraceSummary aggregate_traces(const std::vector<OptimizerRun>& runs);

}  // namespace paretofolio
