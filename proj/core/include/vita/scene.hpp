#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vita/geometry.hpp"
#include "vita/kdtree.hpp"
#include "vita/mesh.hpp"
#include "vita/voxel_grid.hpp"

namespace vita {

enum class JointType { fixed, revolute, prismatic };

struct Joint {
  JointType type = JointType::fixed;
  Vec3 axis = Vec3::UnitZ();
};

struct Link {
  std::string name;
  int parent = -1;          // index of the parent link, -1 for the root
  Pose origin;              // fixed transform from the parent frame
  Joint joint;
  std::optional<TriangleMesh> mesh;  // in the link frame
};

struct TaxelMount {
  std::size_t link = 0;
  Pose mount;  // taxel frame in the link frame; the origin is the sensing point
};

/// Tree of links in topological order (every parent precedes its children,
/// link 0 is the only root). Immutable after construction.
class KinematicChain {
 public:
  KinematicChain(std::vector<Link> links, std::vector<TaxelMount> taxels);

  const std::vector<Link>& links() const { return links_; }
  const std::vector<TaxelMount>& taxels() const { return taxels_; }
  std::size_t movable_joint_count() const { return movable_; }
  std::optional<std::size_t> find_link(const std::string& name) const;

 private:
  std::vector<Link> links_;
  std::vector<TaxelMount> taxels_;
  std::size_t movable_ = 0;
};

/// Link poses for the given joint values (one per revolute/prismatic joint,
/// in link order). The root is placed at `base_pose`.
std::vector<Pose> forward_kinematics(const KinematicChain& chain, std::span<const double> joints,
                                     const Pose& base_pose);

std::vector<Pose> taxel_poses(const KinematicChain& chain, std::span<const Pose> link_poses);

struct TactileReading {
  std::vector<double> values;
  double binary_threshold = 0.5;

  std::vector<bool> activated() const;
};

/// Origins of the taxels whose value exceeds the binary threshold.
PointCloud extract_contacts(const TactileReading& reading, std::span<const Pose> taxel_poses);

/// Union of per-link surface samples in the frame of `link_poses`. Link k is
/// sampled with seed `seed + k`.
PointCloud robot_point_cloud(const KinematicChain& chain, std::span<const Pose> link_poses,
                             std::size_t samples_per_link, std::uint64_t seed);

/// Indices of object points (posed by `pose`) within `contact_threshold` of
/// any tactile point, ascending.
std::vector<std::size_t> contact_patch(const PointCloud& object_cloud, const Pose& pose,
                                       const PointCloud& tactile_cloud, double contact_threshold);

/// Object model in its body frame: mesh, normal-carrying surface samples,
/// occupancy grid and a nearest-neighbor index over the samples.
struct ObjectModel {
  TriangleMesh mesh;
  PointCloud cloud;
  VoxelGrid voxels;
  KdTree index;
  std::uint64_t sample_seed = 0;
};

std::shared_ptr<const ObjectModel> make_object_model(TriangleMesh mesh, std::size_t sample_count,
                                                     double voxel_size, std::uint64_t seed);

struct RobotState {
  std::vector<double> joint_positions;
  Pose base_pose;
  std::vector<Pose> link_poses;
  PointCloud cloud;  // P_R, camera frame
};

struct RobotSampling {
  std::size_t samples_per_link = 256;
  std::uint64_t seed = 0;
};

/// What the previous frame left behind for the kinematic constraint and for
/// taxel-motion initialization.
struct PreviousFrame {
  Pose pose;
  std::vector<std::size_t> patch;
  std::vector<Pose> taxel_poses;  // all mounts, camera frame
  std::vector<bool> activated;
};

/// One frame of observations, all in the camera frame.
struct Scene {
  std::shared_ptr<const ObjectModel> object;
  std::shared_ptr<const KinematicChain> chain;
  RobotState robot;
  TactileReading reading;
  std::vector<Pose> taxel_poses;
  PointCloud tactile;  // P_S
  std::optional<PreviousFrame> previous;
  RobotSampling sampling;
};

Scene build_scene(std::shared_ptr<const ObjectModel> object, std::shared_ptr<const KinematicChain> chain,
                  std::vector<double> joints, const Pose& base_pose, TactileReading reading,
                  const RobotSampling& sampling, std::optional<PreviousFrame> previous = std::nullopt);

PreviousFrame make_previous_frame(const Scene& scene, const Pose& object_pose, double contact_threshold);

}  // namespace vita
