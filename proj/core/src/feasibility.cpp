#include "vita/feasibility.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vita {

void Thresholds::validate() const {
  if (!(contact > 0.0) || !(penetration > 0.0) || !(kinematic > 0.0)) {
    throw std::invalid_argument("Thresholds: all thresholds must be strictly positive");
  }
}

ContactCheck check_contact(const Pose& pose, const PointCloud& object_cloud, const PointCloud& tactile_cloud,
                           double contact_threshold) {
  if (object_cloud.empty()) throw std::invalid_argument("check_contact: empty object cloud");
  ContactCheck out;
  if (tactile_cloud.empty()) return out;
  const KdTree tactile(tactile_cloud.points);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : object_cloud.points) best = std::min(best, tactile.nearest(pose * p).distance);
  out.min_distance = best;
  out.pass = best <= contact_threshold;
  return out;
}

VoxelGrid transform_voxel_grid(const Pose& pose, const VoxelGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("transform_voxel_grid: empty grid");
  std::vector<Vec3> centers = grid.centers();
  for (auto& c : centers) c = pose * c;
  Vec3 lo = centers.front();
  for (const auto& c : centers) lo = lo.cwiseMin(c);
  const double s = grid.voxel_size();
  return voxelize(centers, s, lo - Vec3::Constant(0.5 * s));
}

PenetrationCheck check_penetration(const Pose& pose, const VoxelGrid& object_voxels, const PointCloud& robot_cloud,
                                   double penetration_threshold) {
  if (object_voxels.empty()) throw std::invalid_argument("check_penetration: empty voxel grid");
  if (robot_cloud.empty()) throw std::invalid_argument("check_penetration: empty robot cloud");
  const VoxelGrid posed = transform_voxel_grid(pose, object_voxels);
  std::unordered_set<VoxelIndex, VoxelIndexHash> hit;
  for (const auto& p : robot_cloud.points) {
    const VoxelIndex idx = posed.index_of(p);
    if (posed.occupied(idx)) hit.insert(idx);
  }
  PenetrationCheck out;
  out.overlapping_voxels = hit.size();
  out.total_voxels = posed.size();
  out.overlap_ratio = static_cast<double>(hit.size()) / static_cast<double>(posed.size());
  out.pass = out.overlap_ratio <= penetration_threshold;
  return out;
}

KinematicCheck check_kinematic(std::span<const std::size_t> patch_now,
                               std::optional<std::span<const std::size_t>> patch_prev,
                               const PointCloud& object_cloud, double kinematic_threshold) {
  auto patch_centroid = [&](std::span<const std::size_t> patch) {
    Vec3 sum = Vec3::Zero();
    for (const auto i : patch) {
      if (i >= object_cloud.size()) throw std::invalid_argument("check_kinematic: patch index out of range");
      sum += object_cloud.points[i];
    }
    return Vec3(sum / static_cast<double>(patch.size()));
  };
  KinematicCheck out;
  if (!patch_prev || patch_now.empty() || patch_prev->empty()) {
    // Still validate indices so bad input never passes silently.
    if (!patch_now.empty()) patch_centroid(patch_now);
    if (patch_prev && !patch_prev->empty()) patch_centroid(*patch_prev);
    return out;
  }
  out.evaluated = true;
  out.displacement = (patch_centroid(patch_now) - patch_centroid(*patch_prev)).norm();
  out.pass = out.displacement <= kinematic_threshold;
  return out;
}

FeasibilityReport check_all(const Scene& scene, const Pose& pose, const Thresholds& thresholds) {
  if (!scene.object) throw std::invalid_argument("check_all: scene has no object model");
  thresholds.validate();
  const PointCloud& cloud = scene.object->cloud;
  FeasibilityReport r;
  r.contact = check_contact(pose, cloud, scene.tactile, thresholds.contact);
  r.penetration = check_penetration(pose, scene.object->voxels, scene.robot.cloud, thresholds.penetration);
  const auto patch_now = contact_patch(cloud, pose, scene.tactile, thresholds.contact);
  std::optional<std::span<const std::size_t>> patch_prev;
  if (scene.previous) patch_prev = std::span<const std::size_t>(scene.previous->patch);
  r.kinematic = check_kinematic(patch_now, patch_prev, cloud, thresholds.kinematic);
  r.overall_pass = r.contact.pass && r.penetration.pass && (r.kinematic.pass || !r.kinematic.evaluated);
  return r;
}

void to_json(nlohmann::json& j, const FeasibilityReport& r) {
  nlohmann::json min_distance = nullptr;
  if (std::isfinite(r.contact.min_distance)) min_distance = r.contact.min_distance;
  j = nlohmann::json{
      {"contact", {{"pass", r.contact.pass}, {"min_distance", min_distance}}},
      {"penetration",
       {{"pass", r.penetration.pass},
        {"overlap_ratio", r.penetration.overlap_ratio},
        {"overlapping_voxels", r.penetration.overlapping_voxels},
        {"total_voxels", r.penetration.total_voxels}}},
      {"kinematic",
       {{"pass", r.kinematic.pass}, {"displacement", r.kinematic.displacement}, {"evaluated", r.kinematic.evaluated}}},
      {"overall_pass", r.overall_pass}};
}

void to_json(nlohmann::json& j, const Thresholds& t) {
  j = nlohmann::json{{"contact", t.contact}, {"penetration", t.penetration}, {"kinematic", t.kinematic}};
}

void from_json(const nlohmann::json& j, Thresholds& t) {
  t.contact = j.value("contact", t.contact);
  t.penetration = j.value("penetration", t.penetration);
  t.kinematic = j.value("kinematic", t.kinematic);
}

}  // namespace vita
