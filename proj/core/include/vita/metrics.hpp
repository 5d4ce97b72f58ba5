#pragma once

#include <span>

#include "vita/geometry.hpp"

namespace vita {

struct MetricSample {
  double add = 0.0;
  double adds = 0.0;
  double position_error = 0.0;
};

/// Mean distance between matched points under the two poses.
double add_error(const Pose& est, const Pose& gt, const PointCloud& cloud);

/// Mean distance from each estimated point to the closest ground-truth point.
double adds_error(const Pose& est, const Pose& gt, const PointCloud& cloud);

double position_error(const Pose& est, const Pose& gt);

MetricSample evaluate_pose(const Pose& est, const Pose& gt, const PointCloud& cloud);

inline constexpr double kAucMaxThreshold = 0.1;

/// Exact area under the accuracy-threshold curve on [0, max_threshold],
/// normalized to [0, 1].
double auc(std::span<const double> errors, double max_threshold = kAucMaxThreshold);

}  // namespace vita
