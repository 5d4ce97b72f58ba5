#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "vita/feasibility.hpp"
#include "vita/geometry.hpp"
#include "vita/scene.hpp"

namespace vita {

/// Spring constants, regularization and optimizer settings for test-time
/// refinement. Defaults are the published values.
struct RefinementConfig {
  double attractive_stiffness = 1.0;     // k_a
  double repulsive_stiffness = 1000.0;   // k_r
  double regularization = 1000.0;        // lambda
  double learning_rate = 1e-3;
  int iterations = 10;
  Thresholds thresholds;
  std::size_t sample_count = 2048;
  double voxel_size = 0.005;

  bool use_initialization = true;
  // Ablation switches, off by default.
  bool per_point_hinge = false;       // hinge each robot point instead of the mean depth
  bool per_taxel_attraction = false;  // one spring per tactile point instead of the global min pair

  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

void to_json(nlohmann::json& j, const RefinementConfig& c);
/// Overrides only the keys present in `j`.
void from_json(const nlohmann::json& j, RefinementConfig& c);

struct EnergyBreakdown {
  double attractive = 0.0;
  double repulsive = 0.0;
  double regularization = 0.0;
  double total = 0.0;
};

/// Gradient ordered as [rotation_vector; translation].
using Gradient6 = Eigen::Matrix<double, 6, 1>;

struct TraceEntry {
  DeltaPose delta;
  EnergyBreakdown energy;
  double gradient_norm = 0.0;
};

using RefinementTrace = std::vector<TraceEntry>;

/// Nearest-neighbor pairings held fixed while energy and gradient are
/// evaluated; refreshed once per optimizer step.
struct Correspondences {
  std::vector<std::pair<std::size_t, std::size_t>> springs;  // (object index, tactile index)
  std::vector<std::size_t> robot_to_object;                   // nearest object point per robot point
};

/// E_a + E_r + lambda * L2 for a delta applied on top of a base pose.
/// Object points are first mapped by `base_pose`, then by the delta; robot
/// and tactile points stay fixed in the camera frame.
class SpringEnergy {
 public:
  /// `object_index` must be a tree over `object_cloud` (body frame).
  SpringEnergy(const PointCloud& object_cloud, const KdTree& object_index, const Pose& base_pose,
               const PointCloud& tactile, const PointCloud& robot, const RefinementConfig& config);

  Correspondences correspond(const DeltaPose& delta) const;
  EnergyBreakdown evaluate(const DeltaPose& delta, const Correspondences& corr) const;
  Gradient6 gradient(const DeltaPose& delta, const Correspondences& corr) const;
  double penetration_depth(const DeltaPose& delta, const Correspondences& corr) const;

  EnergyBreakdown evaluate(const DeltaPose& delta) const { return evaluate(delta, correspond(delta)); }

 private:
  const KdTree& index_;
  Pose base_;
  std::vector<Vec3> posed_points_;   // base_pose * p
  std::vector<Vec3> posed_normals_;  // base_pose.R * n
  const PointCloud& tactile_;
  const PointCloud& robot_;
  RefinementConfig config_;
};

/// 0.5 * k_a * min_{i,j} |T_delta(T_base p_i) - s_j|^2; zero without tactile points.
double attractive_energy(const DeltaPose& delta, const Pose& base_pose, const PointCloud& object_cloud,
                         const PointCloud& tactile, double k_a);

/// Mean signed distance of robot points along the outward normal of their
/// nearest posed object point; positive means the robot lies inside.
double penetration_depth(const DeltaPose& delta, const Pose& base_pose, const PointCloud& object_cloud,
                         const PointCloud& robot);

/// 0.5 * k_r * max(0, gamma)^2
double repulsive_energy(double gamma, double k_r);

/// lambda * (|rotation_vector|^2 + |translation|^2)
double regularization(const DeltaPose& delta, double lambda);

/// Mean displacement of taxels active in both frames; zero when none.
DeltaPose init_delta(std::span<const Pose> activated_taxels_prev, std::span<const Pose> activated_taxels_now);
DeltaPose init_delta(const Scene& scene);

struct RefinementResult {
  Pose refined_pose;
  DeltaPose delta;
  RefinementTrace trace;
  EnergyBreakdown initial_energy;
  EnergyBreakdown final_energy;
};

class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, RefinementTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const RefinementTrace& trace() const { return trace_; }

 private:
  RefinementTrace trace_;
};

/// Adam on the delta pose starting from the taxel-motion initialization.
/// Returns T* = T_delta * visual_pose. Throws NumericFailure on non-finite
/// energy.
RefinementResult refine(const Scene& scene, const Pose& visual_pose, const RefinementConfig& config);

void to_json(nlohmann::json& j, const EnergyBreakdown& e);
void to_json(nlohmann::json& j, const TraceEntry& t);

}  // namespace vita
