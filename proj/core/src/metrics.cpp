#include "vita/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "vita/kdtree.hpp"

namespace vita {

double add_error(const Pose& est, const Pose& gt, const PointCloud& cloud) {
  if (cloud.empty()) throw std::invalid_argument("add_error: empty cloud");
  // Differencing the transforms first keeps a pure translation exact, and the
  // running mean of equal terms stays equal to the term.
  const Mat3 dr = est.rotation - gt.rotation;
  const Vec3 dt = est.translation - gt.translation;
  double mean = 0.0;
  std::size_t k = 0;
  for (const auto& p : cloud.points) mean += ((dr * p + dt).norm() - mean) / static_cast<double>(++k);
  return mean;
}

double adds_error(const Pose& est, const Pose& gt, const PointCloud& cloud) {
  if (cloud.empty()) throw std::invalid_argument("adds_error: empty cloud");
  std::vector<Vec3> posed;
  posed.reserve(cloud.size());
  for (const auto& p : cloud.points) posed.push_back(gt * p);
  const KdTree tree(std::move(posed));
  // The own correspondence is always a candidate; taking it in the same
  // arithmetic as add_error keeps ADD-S <= ADD through rounding.
  const Mat3 dr = est.rotation - gt.rotation;
  const Vec3 dt = est.translation - gt.translation;
  double mean = 0.0;
  std::size_t k = 0;
  for (const auto& p : cloud.points) {
    const double d = std::min(tree.nearest(est * p).distance, (dr * p + dt).norm());
    mean += (d - mean) / static_cast<double>(++k);
  }
  return mean;
}

double position_error(const Pose& est, const Pose& gt) { return (est.translation - gt.translation).norm(); }

MetricSample evaluate_pose(const Pose& est, const Pose& gt, const PointCloud& cloud) {
  return {add_error(est, gt, cloud), adds_error(est, gt, cloud), position_error(est, gt)};
}

double auc(std::span<const double> errors, double max_threshold) {
  if (errors.empty()) throw std::invalid_argument("auc: empty error list");
  if (!(max_threshold > 0.0)) throw std::invalid_argument("auc: max_threshold must be positive");
  double sum = 0.0;
  for (const double e : errors) {
    if (e < max_threshold) sum += max_threshold - e;
  }
  return sum / (static_cast<double>(errors.size()) * max_threshold);
}

}  // namespace vita
