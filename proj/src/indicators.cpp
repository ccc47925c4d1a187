#include "paretofolio/indicators.hpp"

#include "paretofolio/error.hpp"
#include "paretofolio/evolve.hpp"

#include <cmath>

namespace paretofolio {

Eigen::MatrixX2d to_matrix(std::span<const ObjectivePoint> points) {
  Eigen::MatrixX2d m(static_cast<Eigen::Index>(points.size()), 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = points[i].risk;
    m(static_cast<Eigen::Index>(i), 1) = points[i].neg_return;
  }
  return m;
}

ObjectiveBounds bounds_from(std::span<const ObjectivePoint> points) {
  if (points.empty()) throw Error(ErrorCode::DegenerateBounds, "bounds_from: no points");
  const Eigen::MatrixX2d m = to_matrix(points);
  ObjectiveBounds b;
  b.ideal = m.colwise().minCoeff().transpose();
  b.nadir = m.colwise().maxCoeff().transpose();
  for (int j = 0; j < 2; ++j) {
    // A flat axis still needs a positive width to be normalizable.
    if (!(b.nadir(j) > b.ideal(j))) b.nadir(j) = b.ideal(j) + std::max(1e-12, std::abs(b.ideal(j)) * 1e-12);
  }
  return b;
}

NormalizedFront normalize_front(const Eigen::Ref<const Eigen::MatrixX2d>& points, const ObjectiveBounds& bounds) {
  if (!((bounds.nadir.array() > bounds.ideal.array()).all())) {
    throw Error(ErrorCode::DegenerateBounds, "normalize_front: nadir must exceed ideal on every axis");
  }
  NormalizedFront out;
  const Eigen::RowVector2d ideal = bounds.ideal.transpose();
  const Eigen::RowVector2d width = (bounds.nadir - bounds.ideal).transpose();
  out.points = (points.rowwise() - ideal).array().rowwise() / width.array();
  for (Eigen::Index i = 0; i < out.points.rows(); ++i) {
    const bool outside = (out.points.row(i).array() < 0.0).any() || (out.points.row(i).array() > 1.0).any();
    if (outside) {
      out.points.row(i) = out.points.row(i).cwiseMax(0.0).cwiseMin(1.0);
      out.clipped.push_back(i);
    }
  }
  return out;
}

double normalized_hypervolume(std::span<const ObjectivePoint> points, const HVConfig& hv) {
  std::vector<ObjectivePoint> feasible;
  for (const auto& p : points) {
    if (p.feasible()) feasible.push_back(p);
  }
  if (feasible.empty()) return 0.0;
  if (!hv.bounds) throw Error(ErrorCode::DegenerateBounds, "normalized_hypervolume: bounds not set");
  const auto normalized = normalize_front(to_matrix(feasible), *hv.bounds);
  return hypervolume_2d(normalized.points, hv.ref_point);
}

TraceSummary aggregate_traces(const std::vector<OptimizerRun>& runs) {
  TraceSummary summary;
  if (runs.empty()) return summary;
  const std::size_t generations = runs.front().hv_trace.size();
  for (const auto& r : runs) {
    if (r.hv_trace.size() != generations || r.archive_hv_trace.size() != generations) {
      throw Error(ErrorCode::MismatchedLengths, "aggregate_traces: runs differ in generation count");
    }
  }
  const double n = static_cast<double>(runs.size());
  summary.mean.assign(generations, 0.0);
  summary.std_dev.assign(generations, 0.0);
  summary.archive_mean.assign(generations, 0.0);
  for (std::size_t g = 0; g < generations; ++g) {
    double sum = 0.0, archive_sum = 0.0;
    for (const auto& r : runs) {
      sum += r.hv_trace[g];
      archive_sum += r.archive_hv_trace[g];
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.hv_trace[g] - mean) * (r.hv_trace[g] - mean);
    summary.mean[g] = mean;
    summary.std_dev[g] = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    summary.archive_mean[g] = archive_sum / n;
  }
  double time = 0.0;
  for (const auto& r : runs) time += r.wall_time_seconds;
  summary.mean_wall_time_seconds = time / n;
  return summary;
}

}  // namespace paretofolio
