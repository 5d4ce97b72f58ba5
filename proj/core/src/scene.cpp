#include "vita/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace vita {

KinematicChain::KinematicChain(std::vector<Link> links, std::vector<TaxelMount> taxels)
    : links_(std::move(links)), taxels_(std::move(taxels)) {
  if (links_.empty()) throw std::invalid_argument("KinematicChain: no links");
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& link = links_[i];
    if (i == 0 && link.parent != -1) throw std::invalid_argument("KinematicChain: link 0 must be the root");
    if (i > 0 && (link.parent < 0 || static_cast<std::size_t>(link.parent) >= i)) {
      throw std::invalid_argument("KinematicChain: link '" + link.name + "' must have an earlier parent");
    }
    if (std::abs(link.joint.axis.norm() - 1.0) > 1e-6) {
      throw std::invalid_argument("KinematicChain: joint axis of '" + link.name + "' is not unit length");
    }
    if (!link.origin.is_valid(1e-6)) {
      throw std::invalid_argument("KinematicChain: invalid origin transform on '" + link.name + "'");
    }
    if (link.mesh) link.mesh->validate();
    if (link.joint.type != JointType::fixed) ++movable_;
  }
  for (const auto& t : taxels_) {
    if (t.link >= links_.size()) throw std::invalid_argument("KinematicChain: taxel mounted on unknown link");
  }
}

std::optional<std::size_t> KinematicChain::find_link(const std::string& name) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<Pose> forward_kinematics(const KinematicChain& chain, std::span<const double> joints,
                                     const Pose& base_pose) {
  if (joints.size() != chain.movable_joint_count()) {
    throw std::invalid_argument("forward_kinematics: expected " + std::to_string(chain.movable_joint_count()) +
                                " joint values, got " + std::to_string(joints.size()));
  }
  const auto& links = chain.links();
  std::vector<Pose> poses(links.size());
  std::size_t next_joint = 0;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& link = links[i];
    const Pose& parent = link.parent < 0 ? base_pose : poses[static_cast<std::size_t>(link.parent)];
    Pose motion;
    switch (link.joint.type) {
      case JointType::revolute:
        motion.rotation = exp_map(link.joint.axis * joints[next_joint++]);
        break;
      case JointType::prismatic:
        motion.translation = link.joint.axis * joints[next_joint++];
        break;
      case JointType::fixed:
        break;
    }
    poses[i] = parent * link.origin * motion;
  }
  return poses;
}

std::vector<Pose> taxel_poses(const KinematicChain& chain, std::span<const Pose> link_poses) {
  if (link_poses.size() != chain.links().size()) throw std::invalid_argument("taxel_poses: link pose count mismatch");
  std::vector<Pose> out;
  out.reserve(chain.taxels().size());
  for (const auto& t : chain.taxels()) out.push_back(link_poses[t.link] * t.mount);
  return out;
}

std::vector<bool> TactileReading::activated() const {
  std::vector<bool> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] > binary_threshold;
  return out;
}

PointCloud extract_contacts(const TactileReading& reading, std::span<const Pose> taxel_poses) {
  if (reading.values.size() != taxel_poses.size()) {
    throw std::invalid_argument("extract_contacts: reading has " + std::to_string(reading.values.size()) +
                                " values for " + std::to_string(taxel_poses.size()) + " taxels");
  }
  PointCloud out;
  for (std::size_t i = 0; i < taxel_poses.size(); ++i) {
    if (reading.values[i] > reading.binary_threshold) out.points.push_back(taxel_poses[i].translation);
  }
  return out;
}

PointCloud robot_point_cloud(const KinematicChain& chain, std::span<const Pose> link_poses,
                             std::size_t samples_per_link, std::uint64_t seed) {
  if (link_poses.size() != chain.links().size()) {
    throw std::invalid_argument("robot_point_cloud: link pose count mismatch");
  }
  if (samples_per_link == 0) throw std::invalid_argument("robot_point_cloud: samples_per_link must be >= 1");
  PointCloud out;
  bool any_mesh = false;
  for (std::size_t k = 0; k < chain.links().size(); ++k) {
    const auto& mesh = chain.links()[k].mesh;
    if (!mesh) continue;
    any_mesh = true;
    const PointCloud local = sample_mesh_surface(*mesh, samples_per_link, seed + k);
    const PointCloud posed = transform_points(link_poses[k], local);
    out.points.insert(out.points.end(), posed.points.begin(), posed.points.end());
    out.normals.insert(out.normals.end(), posed.normals.begin(), posed.normals.end());
  }
  if (!any_mesh) throw std::invalid_argument("robot_point_cloud: chain has no link meshes");
  return out;
}

std::vector<std::size_t> contact_patch(const PointCloud& object_cloud, const Pose& pose,
                                       const PointCloud& tactile_cloud, double contact_threshold) {
  if (object_cloud.empty()) throw std::invalid_argument("contact_patch: empty object cloud");
  std::vector<std::size_t> out;
  if (tactile_cloud.empty()) return out;
  const KdTree tactile(tactile_cloud.points);
  for (std::size_t i = 0; i < object_cloud.size(); ++i) {
    if (tactile.nearest(pose * object_cloud.points[i]).distance <= contact_threshold) out.push_back(i);
  }
  return out;
}

std::shared_ptr<const ObjectModel> make_object_model(TriangleMesh mesh, std::size_t sample_count, double voxel_size,
                                                     std::uint64_t seed) {
  mesh.validate();
  PointCloud cloud = sample_mesh_surface(mesh, sample_count, seed);
  VoxelGrid voxels = voxelize(cloud, voxel_size);
  KdTree index(cloud.points);
  return std::make_shared<const ObjectModel>(
      ObjectModel{std::move(mesh), std::move(cloud), std::move(voxels), std::move(index), seed});
}

Scene build_scene(std::shared_ptr<const ObjectModel> object, std::shared_ptr<const KinematicChain> chain,
                  std::vector<double> joints, const Pose& base_pose, TactileReading reading,
                  const RobotSampling& sampling, std::optional<PreviousFrame> previous) {
  if (!object || !chain) throw std::invalid_argument("build_scene: missing object or chain");
  if (reading.values.size() != chain->taxels().size()) {
    throw std::invalid_argument("build_scene: tactile reading length does not match taxel count");
  }
  Scene scene;
  scene.object = std::move(object);
  scene.robot.link_poses = forward_kinematics(*chain, joints, base_pose);
  scene.robot.joint_positions = std::move(joints);
  scene.robot.base_pose = base_pose;
  scene.robot.cloud = robot_point_cloud(*chain, scene.robot.link_poses, sampling.samples_per_link, sampling.seed);
  scene.taxel_poses = taxel_poses(*chain, scene.robot.link_poses);
  scene.tactile = extract_contacts(reading, scene.taxel_poses);
  scene.reading = std::move(reading);
  scene.chain = std::move(chain);
  scene.previous = std::move(previous);
  scene.sampling = sampling;
  return scene;
}

PreviousFrame make_previous_frame(const Scene& scene, const Pose& object_pose, double contact_threshold) {
  return {object_pose, contact_patch(scene.object->cloud, object_pose, scene.tactile, contact_threshold),
          scene.taxel_poses, scene.reading.activated()};
}

}  // namespace vita
