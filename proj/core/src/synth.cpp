#include "vita/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "vita/random.hpp"

namespace vita {

std::string_view to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::box: return "box";
    case ShapeKind::cylinder: return "cylinder";
    case ShapeKind::mesh: return "mesh";
  }
  return "unknown";
}

ShapeKind parse_shape_kind(std::string_view s) {
  if (s == "sphere") return ShapeKind::sphere;
  if (s == "box") return ShapeKind::box;
  if (s == "cylinder") return ShapeKind::cylinder;
  if (s == "mesh") return ShapeKind::mesh;
  throw std::invalid_argument("unknown shape kind '" + std::string(s) + "'");
}

namespace {

// Moller-Trumbore; returns the ray parameter or -1.
double ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-15) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return -1.0;
  const Vec3 q = s.cross(e1);
  const double v = d.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return -1.0;
  return e2.dot(q) * inv;
}

Vec3 any_perpendicular(const Vec3& v) {
  const Vec3 trial = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return v.cross(trial).normalized();
}

// Right-handed frame with the given z axis and x as close to `x_hint` as possible.
Mat3 frame_from(const Vec3& z, const Vec3& x_hint) {
  const Vec3 zn = z.normalized();
  Vec3 x = x_hint - x_hint.dot(zn) * zn;
  x = x.norm() < 1e-9 ? any_perpendicular(zn) : x.normalized();
  Mat3 r;
  r.col(0) = x;
  r.col(1) = zn.cross(x);
  r.col(2) = zn;
  return r;
}

}  // namespace

Shape::Shape(ShapeSpec spec) : spec_(std::move(spec)) {
  const Vec3& d = spec_.dimensions;
  switch (spec_.kind) {
    case ShapeKind::sphere:
      if (!(d.x() > 0.0)) throw std::invalid_argument("Shape: sphere radius must be positive");
      mesh_ = make_sphere(d.x(), 3);
      break;
    case ShapeKind::box:
      if (!(d.minCoeff() > 0.0)) throw std::invalid_argument("Shape: box extents must be positive");
      mesh_ = make_box(d);
      break;
    case ShapeKind::cylinder:
      if (!(d.x() > 0.0) || !(d.y() > 0.0)) throw std::invalid_argument("Shape: cylinder dimensions must be positive");
      mesh_ = make_cylinder(d.x(), d.y(), 48);
      break;
    case ShapeKind::mesh:
      if (spec_.mesh_path.empty()) throw std::invalid_argument("Shape: mesh kind needs a mesh_path");
      mesh_ = load_mesh(spec_.mesh_path);
      center_ = centroid(mesh_.vertices);
      break;
  }
  mesh_.validate();
}

double Shape::signed_distance(const Vec3& p) const {
  const Vec3& d = spec_.dimensions;
  switch (spec_.kind) {
    case ShapeKind::sphere:
      return p.norm() - d.x();
    case ShapeKind::box: {
      const Vec3 q = p.cwiseAbs() - 0.5 * d;
      return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
    }
    case ShapeKind::cylinder: {
      const Eigen::Vector2d q(p.head<2>().norm() - d.x(), std::abs(p.z()) - 0.5 * d.y());
      return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
    }
    case ShapeKind::mesh:
      return closest_surface_point(mesh_, p).distance;
  }
  return 0.0;
}

Vec3 Shape::normal(const Vec3& p) const {
  const Vec3& d = spec_.dimensions;
  switch (spec_.kind) {
    case ShapeKind::sphere:
      return p.normalized();
    case ShapeKind::box: {
      int axis = 0;
      p.cwiseAbs().cwiseQuotient(0.5 * d).maxCoeff(&axis);
      Vec3 n = Vec3::Zero();
      n[axis] = p[axis] < 0.0 ? -1.0 : 1.0;
      return n;
    }
    case ShapeKind::cylinder: {
      const double radial = p.head<2>().norm() / d.x();
      const double axial = std::abs(p.z()) / (0.5 * d.y());
      if (axial >= radial) return Vec3(0.0, 0.0, p.z() < 0.0 ? -1.0 : 1.0);
      return Vec3(p.x(), p.y(), 0.0).normalized();
    }
    case ShapeKind::mesh:
      return mesh_.face_normal(closest_surface_point(mesh_, p).triangle);
  }
  return Vec3::UnitZ();
}

Vec3 Shape::surface_along(const Vec3& direction) const {
  const Vec3 u = direction.normalized();
  const Vec3& d = spec_.dimensions;
  const double inf = std::numeric_limits<double>::infinity();
  switch (spec_.kind) {
    case ShapeKind::sphere:
      return d.x() * u;
    case ShapeKind::box: {
      double s = inf;
      for (int i = 0; i < 3; ++i) {
        if (std::abs(u[i]) > 1e-12) s = std::min(s, 0.5 * d[i] / std::abs(u[i]));
      }
      return s * u;
    }
    case ShapeKind::cylinder: {
      double s = inf;
      const double r = u.head<2>().norm();
      if (r > 1e-12) s = d.x() / r;
      if (std::abs(u.z()) > 1e-12) s = std::min(s, 0.5 * d.y() / std::abs(u.z()));
      return s * u;
    }
    case ShapeKind::mesh: {
      double best = -1.0;
      for (const auto& t : mesh_.triangles) {
        best = std::max(best, ray_triangle(center_, u, mesh_.vertices[t[0]], mesh_.vertices[t[1]],
                                           mesh_.vertices[t[2]]));
      }
      if (!(best > 0.0)) throw GenerationError("mesh surface not reachable from its center along the closing direction");
      return center_ + best * u;
    }
  }
  return Vec3::Zero();
}

double Shape::extent(const Vec3& direction) const {
  const Vec3 u = direction.normalized();
  const Vec3& d = spec_.dimensions;
  switch (spec_.kind) {
    case ShapeKind::sphere: return d.x();
    case ShapeKind::box: return 0.5 * d.cwiseProduct(u.cwiseAbs()).sum();
    case ShapeKind::cylinder: return d.x() * u.head<2>().norm() + 0.5 * d.y() * std::abs(u.z());
    case ShapeKind::mesh: return u.dot(mesh_.support(u));
  }
  return 0.0;
}

void GraspSpec::validate() const {
  if (fingers < 2) throw std::invalid_argument("GraspSpec: at least two fingers");
  if (!(approach.norm() > 0.0)) throw std::invalid_argument("GraspSpec: zero approach direction");
  const Vec3 a = approach.normalized();
  if ((closing_axis - closing_axis.dot(a) * a).norm() < 1e-6) {
    throw std::invalid_argument("GraspSpec: closing axis parallel to approach");
  }
  if (!finger_gaps.empty() && finger_gaps.size() != static_cast<std::size_t>(fingers)) {
    throw std::invalid_argument("GraspSpec: finger_gaps must have one entry per finger");
  }
  for (const double g : finger_gaps) {
    if (!(g >= 0.0)) throw GenerationError("GraspSpec: negative finger gap");
  }
  if (taxel_rows < 1 || taxel_cols < 1 || !(taxel_pitch > 0.0)) throw std::invalid_argument("GraspSpec: bad taxel grid");
  if (!(pad_offset >= 0.0) || !(pad_size.minCoeff() > 0.0) || !(palm_size.minCoeff() > 0.0)) {
    throw std::invalid_argument("GraspSpec: bad pad or palm geometry");
  }
  if (!(palm_gap >= 0.0) || !(finger_clearance > 0.0) || !(max_reach > 0.0) || !(activation_range > 0.0)) {
    throw std::invalid_argument("GraspSpec: bad distances");
  }
  if (samples_per_link == 0) throw std::invalid_argument("GraspSpec: samples_per_link must be positive");
}

GripperModel build_gripper(const Shape& shape, const std::vector<GraspSpec>& grasps) {
  if (grasps.empty()) throw std::invalid_argument("build_gripper: no hands");
  std::vector<Link> links;
  std::vector<TaxelMount> taxels;
  links.push_back({"base", -1, Pose{}, {}, std::nullopt});

  GripperModel out;
  std::size_t joint = 0;
  Pose palm0;
  for (std::size_t h = 0; h < grasps.size(); ++h) {
    const GraspSpec& g = grasps[h];
    g.validate();
    const Vec3 a = g.approach.normalized();
    const Vec3 c = (g.closing_axis - g.closing_axis.dot(a) * a).normalized();
    const Vec3 center = shape.center();

    // Palm face sits palm_gap behind the object's support plane along -a.
    const double e = shape.extent(-a);
    const Pose palm{frame_from(a, c), center + ((e + g.palm_gap) - (-a).dot(center)) * (-a)};
    if (h == 0) palm0 = palm;
    const Pose rel = palm0.inverse() * palm;

    const std::string prefix = "hand" + std::to_string(h) + "_";
    const int base_idx = 0;
    HandLayout layout;
    layout.first_joint = joint;
    layout.fingers = g.fingers;
    layout.approach_in_base = rel.rotation * Vec3::UnitZ();
    layout.first_taxel = taxels.size();

    const int arm_x = static_cast<int>(links.size());
    links.push_back({prefix + "arm_x", base_idx, Pose::from_translation(rel.translation),
                     {JointType::prismatic, Vec3::UnitX()}, std::nullopt});
    links.push_back({prefix + "arm_y", arm_x, Pose{}, {JointType::prismatic, Vec3::UnitY()}, std::nullopt});
    links.push_back({prefix + "arm_z", arm_x + 1, Pose{}, {JointType::prismatic, Vec3::UnitZ()}, std::nullopt});
    joint += 3;
    layout.palm_link = links.size();
    const Vec3 palm_thick(0.0, 0.0, -0.5 * g.palm_size.z());
    links.push_back({prefix + "palm", arm_x + 2, Pose{rel.rotation, Vec3::Zero()}, {},
                     make_box(g.palm_size, palm_thick)});
    const int palm_idx = static_cast<int>(layout.palm_link);
    layout.first_finger_link = links.size();

    const double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < g.fingers; ++k) {
      const double phi = two_pi * k / g.fingers;
      const Vec3 dir = std::cos(phi) * c + std::sin(phi) * a.cross(c);
      const Vec3 contact = shape.surface_along(dir);
      if ((contact - center).norm() > g.max_reach || a.dot(contact - palm.translation) > g.max_reach) {
        throw GenerationError("finger " + std::to_string(k) + " cannot reach the surface");
      }
      const Vec3 n = shape.normal(contact);
      const double gap = g.finger_gaps.empty() ? 0.0 : g.finger_gaps[static_cast<std::size_t>(k)];
      // Open pad: clearance out along the normal; the joint closes along pad z.
      const Pose pad_open{frame_from(-n, a), contact + g.finger_clearance * n};
      links.push_back({prefix + "finger" + std::to_string(k), palm_idx, palm.inverse() * pad_open,
                       {JointType::prismatic, Vec3::UnitZ()},
                       make_box(Vec3(g.pad_size.x(), g.pad_size.y(), g.pad_size.z()),
                                Vec3(0.0, 0.0, -g.pad_offset - 0.5 * g.pad_size.z()))});
      layout.closed.push_back(g.finger_clearance - gap);
      const std::size_t link = links.size() - 1;
      for (int r = 0; r < g.taxel_rows; ++r) {
        for (int q = 0; q < g.taxel_cols; ++q) {
          const Vec3 off((r - 0.5 * (g.taxel_rows - 1)) * g.taxel_pitch, (q - 0.5 * (g.taxel_cols - 1)) * g.taxel_pitch,
                         0.0);
          taxels.push_back({link, Pose::from_translation(off)});
        }
      }
      ++joint;
    }
    out.hands.push_back(std::move(layout));
  }
  out.chain = std::make_shared<const KinematicChain>(std::move(links), std::move(taxels));
  out.palm_in_body = palm0;
  out.joint_count = joint;
  return out;
}

std::vector<double> taxel_values(const Shape& shape, const Pose& object_pose, std::span<const Pose> taxel_poses,
                                 double activation_range) {
  const Pose to_body = object_pose.inverse();
  std::vector<double> values;
  values.reserve(taxel_poses.size());
  for (const auto& t : taxel_poses) {
    const double d = shape.signed_distance(to_body * t.translation);
    values.push_back(std::clamp(1.0 - std::max(d, 0.0) / activation_range, 0.0, 1.0));
  }
  return values;
}

namespace {

Pose random_object_pose(Rng& rng) {
  const Mat3 r = random_rotation(rng);
  const Vec3 t(uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05), 0.5 + uniform(rng, -0.05, 0.05));
  return {r, t};
}

std::vector<double> hand_joints(const GripperModel& g, std::size_t hand, const Vec3& arm, double closure,
                                std::vector<double> joints) {
  const HandLayout& h = g.hands[hand];
  for (int i = 0; i < 3; ++i) joints[h.first_joint + static_cast<std::size_t>(i)] = arm[i];
  for (int k = 0; k < h.fingers; ++k) {
    joints[h.first_joint + 3 + static_cast<std::size_t>(k)] = closure * h.closed[static_cast<std::size_t>(k)];
  }
  return joints;
}

constexpr int kMaxAttempts = 64;

}  // namespace

GeneratedScene generate_scene(const ShapeSpec& shape_spec, const GraspSpec& grasp, std::uint64_t seed,
                              const ObjectSampling& sampling, const Thresholds& thresholds) {
  grasp.validate();
  Shape shape(shape_spec);
  GripperModel gripper = build_gripper(shape, {grasp});
  const auto object = make_object_model(shape.mesh(), sampling.sample_count, sampling.voxel_size,
                                        derive_seed(seed, {0}));
  const std::vector<double> joints = hand_joints(gripper, 0, Vec3::Zero(), 1.0,
                                                 std::vector<double>(gripper.joint_count, 0.0));
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, {1, static_cast<std::uint64_t>(attempt)}));
    const Pose gt = random_object_pose(rng);
    const Pose base = gt * gripper.palm_in_body;
    const auto links = forward_kinematics(*gripper.chain, joints, base);
    const auto taxels = taxel_poses(*gripper.chain, links);
    TactileReading reading{taxel_values(shape, gt, taxels, grasp.activation_range), grasp.binary_threshold};
    const RobotSampling rs{grasp.samples_per_link, derive_seed(seed, {2, static_cast<std::uint64_t>(attempt)})};
    Scene scene = build_scene(object, gripper.chain, joints, base, std::move(reading), rs);
    if (check_all(scene, gt, thresholds).overall_pass) {
      return {std::move(scene), gt, std::move(shape), grasp, std::move(gripper), seed};
    }
  }
  throw GenerationError("no feasible placement found after " + std::to_string(kMaxAttempts) + " attempts");
}

ShapeSpec random_shape(std::uint64_t seed) {
  Rng rng(seed);
  ShapeSpec s;
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
      s.kind = ShapeKind::sphere;
      s.dimensions = Vec3(uniform(rng, 0.03, 0.06), 0.0, 0.0);
      break;
    case 1:
      s.kind = ShapeKind::box;
      s.dimensions = Vec3(uniform(rng, 0.04, 0.10), uniform(rng, 0.04, 0.10), uniform(rng, 0.04, 0.10));
      break;
    default:
      s.kind = ShapeKind::cylinder;
      s.dimensions = Vec3(uniform(rng, 0.025, 0.045), uniform(rng, 0.06, 0.14), 0.0);
      break;
  }
  return s;
}

GraspSpec default_grasp(const ShapeSpec& shape, std::uint64_t seed) {
  Rng rng(seed);
  GraspSpec g;
  const double sign = uniform(rng) < 0.5 ? -1.0 : 1.0;
  switch (shape.kind) {
    case ShapeKind::box: {
      std::array<int, 3> axes{0, 1, 2};
      std::shuffle(axes.begin(), axes.end(), rng);
      g.approach = sign * Vec3::Unit(axes[0]);
      g.closing_axis = Vec3::Unit(axes[1]);
      break;
    }
    case ShapeKind::cylinder:
      // Side grasp: palm on the curved wall, fingers across the diameter.
      g.approach = sign * Vec3::UnitX();
      g.closing_axis = Vec3::UnitY();
      break;
    default: {
      const Vec3 a = random_unit_vector(rng);
      g.approach = a;
      g.closing_axis = any_perpendicular(a);
      break;
    }
  }
  return g;
}

void NoiseModel::validate() const {
  if (!(translation_sigma >= 0.0) || !(rotation_sigma >= 0.0) || !(outlier_translation >= 0.0)) {
    throw std::invalid_argument("NoiseModel: sigmas must be non-negative");
  }
  if (!(dropout_probability >= 0.0 && dropout_probability <= 1.0)) {
    throw std::invalid_argument("NoiseModel: dropout_probability must lie in [0, 1]");
  }
}

Pose perturb_pose(const Pose& gt, const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  if (noise.dropout_probability == 0.0 && noise.translation_sigma == 0.0 && noise.rotation_sigma == 0.0) return gt;
  Rng rng(seed);
  const bool outlier = noise.dropout_probability > 0.0 && uniform(rng) < noise.dropout_probability;
  if (outlier) {
    const Vec3 offset = noise.outlier_translation * random_unit_vector(rng);
    return {random_rotation(rng) * gt.rotation, gt.translation + offset};
  }
  const Vec3 dt(gaussian(rng, noise.translation_sigma), gaussian(rng, noise.translation_sigma),
                gaussian(rng, noise.translation_sigma));
  Mat3 r = gt.rotation;
  if (noise.rotation_sigma > 0.0) {
    const Vec3 axis = random_unit_vector(rng);
    const double angle = std::abs(gaussian(rng, noise.rotation_sigma));
    r = exp_map(angle * axis) * gt.rotation;
  }
  return {r, gt.translation + dt};
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::grasp: return "grasp";
    case Scenario::pick: return "pick";
    case Scenario::handover: return "handover";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view s) {
  if (s == "grasp") return Scenario::grasp;
  if (s == "pick") return Scenario::pick;
  if (s == "handover") return Scenario::handover;
  throw std::invalid_argument("unknown scenario '" + std::string(s) + "'");
}

Scene frame_scene(const Trajectory& traj, std::size_t f, std::optional<PreviousFrame> previous) {
  if (f >= traj.frames.size()) throw std::out_of_range("frame_scene: frame index out of range");
  const TrajectoryFrame& fr = traj.frames[f];
  return build_scene(traj.object, traj.chain, fr.joints, fr.base_pose, TactileReading{fr.taxel_values,
                     traj.binary_threshold}, traj.sampling, std::move(previous));
}

std::optional<PreviousFrame> previous_record(const Trajectory& traj, std::size_t f, const Pose& pose,
                                             double contact_threshold) {
  if (f == 0) return std::nullopt;
  return make_previous_frame(frame_scene(traj, f - 1), pose, contact_threshold);
}

namespace {

constexpr double kRetract = 0.03;
constexpr double kPickLift = 0.2;
constexpr double kHandoverTravel = 0.1;
constexpr double kMaxStep = 0.05;

double cosine_profile(std::size_t f, std::size_t n) {
  return 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(f) / static_cast<double>(n - 1)));
}

// Largest travel whose cosine profile keeps every per-frame step within kMaxStep.
double capped_travel(double travel, std::size_t n) {
  return std::min(travel, kMaxStep * 2.0 * static_cast<double>(n - 1) / std::numbers::pi);
}

bool trajectory_feasible(const Trajectory& traj) {
  const Thresholds th;
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    const Pose& gt = traj.frames[f].ground_truth;
    const std::optional<PreviousFrame> prev =
        f == 0 ? std::nullopt : previous_record(traj, f, traj.frames[f - 1].ground_truth, th.contact);
    if (!check_all(frame_scene(traj, f, prev), gt, th).overall_pass) return false;
  }
  return true;
}

Trajectory script(Scenario scenario, std::size_t n, std::uint64_t seed, std::uint64_t attempt,
                  const ObjectSampling& sampling) {
  Trajectory traj;
  traj.scenario = scenario;
  traj.seed = seed;
  traj.shape = random_shape(derive_seed(seed, {1, attempt}));
  const Shape shape(traj.shape);
  GraspSpec grasp = default_grasp(traj.shape, derive_seed(seed, {2, attempt}));
  std::vector<GraspSpec> grasps{grasp};
  if (scenario == Scenario::handover) {
    GraspSpec other = grasp;
    const Vec3 a = grasp.approach.normalized();
    other.approach = -a;
    other.closing_axis = a.cross(grasp.closing_axis).normalized();
    grasps.push_back(other);
  }
  const GripperModel gripper = build_gripper(shape, grasps);
  traj.chain = gripper.chain;
  traj.binary_threshold = grasp.binary_threshold;
  traj.object = make_object_model(shape.mesh(), sampling.sample_count, sampling.voxel_size,
                                  derive_seed(seed, {4, attempt}));
  traj.sampling = {grasp.samples_per_link, derive_seed(seed, {5, attempt})};

  Rng rng(derive_seed(seed, {3, attempt}));
  const Pose gt0 = random_object_pose(rng);
  const Pose base_pose = gt0 * gripper.palm_in_body;
  const Mat3 to_base = base_pose.rotation.transpose();

  const std::size_t transfer = n / 2;
  const double lift = capped_travel(kPickLift, n);
  const double travel = capped_travel(kHandoverTravel, n);
  const std::size_t approach_frames = std::max<std::size_t>(1, n / 2);

  for (std::size_t f = 0; f < n; ++f) {
    Vec3 motion = Vec3::Zero();  // camera frame
    std::vector<double> joints(gripper.joint_count, 0.0);
    switch (scenario) {
      case Scenario::grasp: {
        if (f < approach_frames) {
          const double r = kRetract * (1.0 - static_cast<double>(f) / static_cast<double>(approach_frames));
          joints = hand_joints(gripper, 0, -r * gripper.hands[0].approach_in_base, 0.0, std::move(joints));
        } else {
          const double closure =
              static_cast<double>(f - approach_frames + 1) / static_cast<double>(n - approach_frames);
          joints = hand_joints(gripper, 0, Vec3::Zero(), closure, std::move(joints));
        }
        break;
      }
      case Scenario::pick:
        motion = Vec3(0.0, 0.0, lift * cosine_profile(f, n));
        joints = hand_joints(gripper, 0, to_base * motion, 1.0, std::move(joints));
        break;
      case Scenario::handover: {
        motion = Vec3(travel * cosine_profile(f, n), 0.0, 0.0);
        const Vec3 at_transfer = Vec3(travel * cosine_profile(transfer, n), 0.0, 0.0);
        const bool before = f < transfer;
        joints = hand_joints(gripper, 0, to_base * (before ? motion : at_transfer), before ? 1.0 : 0.0,
                             std::move(joints));
        const double r = before ? kRetract * (1.0 - static_cast<double>(f) / static_cast<double>(transfer)) : 0.0;
        joints = hand_joints(gripper, 1, to_base * motion - r * gripper.hands[1].approach_in_base, before ? 0.0 : 1.0,
                             std::move(joints));
        break;
      }
    }
    TrajectoryFrame fr;
    fr.ground_truth = Pose{gt0.rotation, gt0.translation + motion};
    fr.base_pose = base_pose;
    const auto links = forward_kinematics(*traj.chain, joints, base_pose);
    fr.taxel_values = taxel_values(shape, fr.ground_truth, taxel_poses(*traj.chain, links), grasp.activation_range);
    fr.joints = std::move(joints);
    fr.visual = perturb_pose(fr.ground_truth, NoiseModel{}, derive_seed(seed, {6, attempt, f}));
    traj.frames.push_back(std::move(fr));
  }
  return traj;
}

}  // namespace

Trajectory simulate_trajectory(Scenario scenario, std::size_t n_frames, std::uint64_t seed,
                               const ObjectSampling& sampling) {
  if (n_frames < 2) throw std::invalid_argument("simulate_trajectory: need at least two frames");
  for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Trajectory traj = script(scenario, n_frames, seed, attempt, sampling);
    if (trajectory_feasible(traj)) return traj;
  }
  throw GenerationError("simulate_trajectory: no feasible trajectory after " + std::to_string(kMaxAttempts) +
                        " attempts");
}

}  // namespace vita
