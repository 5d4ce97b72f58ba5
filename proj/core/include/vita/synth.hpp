#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vita/feasibility.hpp"
#include "vita/geometry.hpp"
#include "vita/mesh.hpp"
#include "vita/scene.hpp"

namespace vita {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ShapeKind { sphere, box, cylinder, mesh };

/// sphere: dimensions.x = radius. box: full extents. cylinder: x = radius,
/// y = height (axis along body z). mesh: loaded from mesh_path, used as is.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::sphere;
  Vec3 dimensions = Vec3(0.05, 0.0, 0.0);
  std::string mesh_path;
};

std::string_view to_string(ShapeKind k);
ShapeKind parse_shape_kind(std::string_view s);

/// Surface geometry in the body frame. Primitives are centered at the origin
/// and answered in closed form; meshes fall back to triangle queries.
class Shape {
 public:
  explicit Shape(ShapeSpec spec);

  const ShapeSpec& spec() const { return spec_; }
  const TriangleMesh& mesh() const { return mesh_; }
  /// Reference point fingers close toward: the origin, or the vertex mean of a mesh.
  Vec3 center() const { return center_; }

  /// Negative inside. Meshes report the unsigned distance.
  double signed_distance(const Vec3& p) const;
  /// Outward unit normal at (or nearest to) a surface point.
  Vec3 normal(const Vec3& surface_point) const;
  /// Outermost surface crossing of the ray center + s * direction, s > 0.
  Vec3 surface_along(const Vec3& direction) const;
  /// max over the surface of direction . x
  double extent(const Vec3& direction) const;

 private:
  ShapeSpec spec_;
  TriangleMesh mesh_;
  Vec3 center_ = Vec3::Zero();
};

/// Finger layout relative to the object body frame. Fingers close toward the
/// shape center from directions spread evenly around the approach axis,
/// starting at `closing_axis`. Each finger carries a rows x cols taxel grid
/// on a pad whose sensing plane sits `pad_offset` in front of the finger
/// plate.
struct GraspSpec {
  int fingers = 2;
  Vec3 approach = Vec3::UnitZ();      // direction the hand moves toward the object
  Vec3 closing_axis = Vec3::UnitX();  // projected perpendicular to approach
  std::vector<double> finger_gaps;    // per finger distance short of the surface; empty = all touching
  int taxel_rows = 2;
  int taxel_cols = 3;
  double taxel_pitch = 0.003;
  double pad_offset = 0.0075;
  Vec3 pad_size = Vec3(0.02, 0.016, 0.003);   // along approach, lateral, thickness
  Vec3 palm_size = Vec3(0.04, 0.04, 0.003);
  double palm_gap = 0.009;           // palm face to object support along the approach axis
  double finger_clearance = 0.03;    // open pad distance from the contact point
  double max_reach = 0.15;
  double activation_range = 0.001;   // taxel value falls from 1 to 0 over this distance
  double binary_threshold = 0.5;
  std::size_t samples_per_link = 256;

  void validate() const;
};

struct HandLayout {
  std::size_t palm_link = 0;
  std::size_t first_finger_link = 0;
  std::size_t first_joint = 0;   // arm x/y/z, then fingers
  std::size_t first_taxel = 0;
  int fingers = 0;
  Vec3 approach_in_base = Vec3::UnitZ();
  std::vector<double> closed;    // finger joint value at contact
};

/// One or more hands on a shared meshless base (link 0), each on three
/// prismatic arm joints along the base axes. Zero arm joints and closed
/// fingers reproduce the grasp around the object for every hand.
struct GripperModel {
  std::shared_ptr<const KinematicChain> chain;
  std::vector<HandLayout> hands;
  Pose palm_in_body;  // hand 0 palm relative to the object body at zero joints
  std::size_t joint_count = 0;
};

GripperModel build_gripper(const Shape& shape, const std::vector<GraspSpec>& grasps);

/// clamp(1 - max(d, 0) / range, 0, 1) for the distance from each taxel
/// origin to the posed object surface.
std::vector<double> taxel_values(const Shape& shape, const Pose& object_pose, std::span<const Pose> taxel_poses,
                                 double activation_range);

struct GeneratedScene {
  Scene scene;
  Pose ground_truth;
  Shape shape;
  GraspSpec grasp;
  GripperModel gripper;
  std::uint64_t seed = 0;
};

struct ObjectSampling {
  std::size_t sample_count = 2048;
  double voxel_size = 0.005;
};

/// Object near (0, 0, 0.5) with a random orientation and the gripper closed
/// on it. Retries with derived seeds until the ground truth passes every
/// feasibility check; throws GenerationError when the grasp is unreachable
/// or no attempt succeeds.
GeneratedScene generate_scene(const ShapeSpec& shape, const GraspSpec& grasp, std::uint64_t seed,
                              const ObjectSampling& sampling = {}, const Thresholds& thresholds = {});

/// Randomized shape and grasp used for benchmark scenes.
ShapeSpec random_shape(std::uint64_t seed);
GraspSpec default_grasp(const ShapeSpec& shape, std::uint64_t seed);

struct NoiseModel {
  double translation_sigma = 0.01;
  double rotation_sigma = 0.05;
  double dropout_probability = 0.0;
  double outlier_translation = 0.3;

  void validate() const;
};

/// Mock visual estimate. Rotation noise acts about the object's own origin.
Pose perturb_pose(const Pose& gt, const NoiseModel& noise, std::uint64_t seed);

enum class Scenario { grasp, pick, handover };
std::string_view to_string(Scenario s);
/// Throws std::invalid_argument on an unknown name.
Scenario parse_scenario(std::string_view s);

struct TrajectoryFrame {
  std::vector<double> joints;
  Pose base_pose;
  std::vector<double> taxel_values;
  Pose ground_truth;
  Pose visual;  // one perturbed estimate, for single-frame checks
};

struct Trajectory {
  Scenario scenario = Scenario::grasp;
  std::uint64_t seed = 0;
  ShapeSpec shape;
  std::shared_ptr<const ObjectModel> object;
  std::shared_ptr<const KinematicChain> chain;
  RobotSampling sampling;
  double binary_threshold = 0.5;
  std::vector<TrajectoryFrame> frames;
};

/// Frame `f` as a scene. The previous record, when given, is attached as is.
Scene frame_scene(const Trajectory& traj, std::size_t f, std::optional<PreviousFrame> previous = std::nullopt);

/// Previous record for frame f, built from frame f - 1 with the object at `pose`.
std::optional<PreviousFrame> previous_record(const Trajectory& traj, std::size_t f, const Pose& pose,
                                             double contact_threshold);

/// Scripted motion: grasp approaches then closes; pick lifts 0.2 m along
/// camera z; handover transfers the object between two hands at frame
/// n_frames / 2.
Trajectory simulate_trajectory(Scenario scenario, std::size_t n_frames, std::uint64_t seed,
                               const ObjectSampling& sampling = {});

}  // namespace vita
