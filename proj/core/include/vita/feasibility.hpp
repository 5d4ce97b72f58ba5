#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vita/geometry.hpp"
#include "vita/scene.hpp"
#include "vita/voxel_grid.hpp"

namespace vita {

/// Contact distance (m), allowed penetration ratio, kinematic displacement (m).
struct Thresholds {
  double contact = 0.05;
  double penetration = 0.008;
  double kinematic = 0.03;

  void validate() const;
};

struct ContactCheck {
  bool pass = true;
  /// +inf when there is no tactile contact (vacuous pass).
  double min_distance = std::numeric_limits<double>::infinity();
};

struct PenetrationCheck {
  bool pass = true;
  double overlap_ratio = 0.0;
  std::size_t overlapping_voxels = 0;
  std::size_t total_voxels = 0;
};

struct KinematicCheck {
  bool pass = true;
  double displacement = 0.0;
  bool evaluated = false;
};

struct FeasibilityReport {
  ContactCheck contact;
  PenetrationCheck penetration;
  KinematicCheck kinematic;
  bool overall_pass = true;
};

/// Minimum pairwise distance between the posed object cloud and the tactile
/// cloud. An empty tactile cloud passes vacuously.
ContactCheck check_contact(const Pose& pose, const PointCloud& object_cloud, const PointCloud& tactile_cloud,
                           double contact_threshold);

/// Occupied voxel centers moved by `pose` and re-binned on an axis-aligned
/// grid of the same voxel size. The grid origin sits half a voxel below the
/// componentwise minimum of the moved centers, so every center lands in the
/// middle of its new cell.
VoxelGrid transform_voxel_grid(const Pose& pose, const VoxelGrid& grid);

/// Fraction of posed object voxels that contain at least one robot point.
PenetrationCheck check_penetration(const Pose& pose, const VoxelGrid& object_voxels, const PointCloud& robot_cloud,
                                   double penetration_threshold);

/// Distance between contact-patch centroids in the object body frame. Not
/// evaluated (and passing) when either patch is empty or there is no
/// previous frame.
KinematicCheck check_kinematic(std::span<const std::size_t> patch_now,
                               std::optional<std::span<const std::size_t>> patch_prev,
                               const PointCloud& object_cloud, double kinematic_threshold);

FeasibilityReport check_all(const Scene& scene, const Pose& pose, const Thresholds& thresholds);

void to_json(nlohmann::json& j, const FeasibilityReport& report);
void to_json(nlohmann::json& j, const Thresholds& t);
void from_json(const nlohmann::json& j, Thresholds& t);

}  // namespace vita
