#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vita {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform in SE(3). Rotation is stored as an orthonormal matrix,
/// translation in meters. `a * b` composes (apply b first, then a).
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  Pose operator*(const Pose& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  Pose inverse() const {
    const Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  /// Checks ||R^T R - I|| and |det R - 1| against `tol`.
  bool is_valid(double tol = 1e-9) const;
};

Mat3 skew(const Vec3& v);

/// Rodrigues' formula. Throws std::invalid_argument on non-finite input.
Mat3 exp_map(const Vec3& rotation_vector);

/// Inverse of exp_map, angle in [0, pi].
Vec3 log_map(const Mat3& rotation);

/// Right Jacobian of SO(3): exp(w + d) ~= exp(w) exp(J_r(w) d).
Mat3 right_jacobian(const Vec3& rotation_vector);

/// Geodesic angle between two rotations, radians.
double rotation_angle(const Mat3& a, const Mat3& b);

/// Optimization variable of the refiner: angle-axis rotation plus translation.
struct DeltaPose {
  Vec3 rotation_vector = Vec3::Zero();
  Vec3 translation = Vec3::Zero();

  Pose to_pose() const { return {exp_map(rotation_vector), translation}; }
  double squared_norm() const {
    return rotation_vector.squaredNorm() + translation.squaredNorm();
  }
};

/// Points in meters with optional per-point unit normals.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty, or one per point

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty() && normals.size() == points.size(); }
  Vec3 centroid() const;
};

/// R*p + t for each point; normals are rotated only.
PointCloud transform_points(const Pose& pose, const PointCloud& cloud);

Vec3 centroid(std::span<const Vec3> points);

}  // namespace vita
