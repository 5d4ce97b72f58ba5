#include "vita/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vita {

namespace {
constexpr double kTaylorThreshold = 1e-8;
constexpr double kJacobianSeriesThreshold = 1e-6;
}  // namespace

bool Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).norm();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Mat3 skew(const Vec3& v) {
  Mat3 k;
  k << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return k;
}

Mat3 exp_map(const Vec3& w) {
  if (!w.allFinite()) throw std::invalid_argument("exp_map: non-finite rotation vector");
  const double theta = w.norm();
  const Mat3 k = skew(w);
  if (theta < kTaylorThreshold) {
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log_map(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-8) return 0.5 * v;
  if (std::numbers::pi - theta < 1e-6) {
    // Near pi the antisymmetric part vanishes; recover the axis from R + I.
    const Mat3 b = 0.5 * (r + Mat3::Identity());
    int col = 0;
    b.diagonal().maxCoeff(&col);
    Vec3 axis = b.col(col) / std::sqrt(std::max(b(col, col), 1e-300));
    axis.normalize();
    if (axis.dot(v) < 0.0) axis = -axis;
    return theta * axis;
  }
  return theta / (2.0 * std::sin(theta)) * v;
}

Mat3 right_jacobian(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = skew(w);
  if (theta < kJacobianSeriesThreshold) {
    return Mat3::Identity() - 0.5 * k + (1.0 / 6.0) * k * k;
  }
  const double t2 = theta * theta;
  const double a = (1.0 - std::cos(theta)) / t2;
  const double b = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3::Identity() - a * k + b * k * k;
}

double rotation_angle(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  return std::acos(std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0));
}

Vec3 PointCloud::centroid() const { return vita::centroid(points); }

Vec3 centroid(std::span<const Vec3> points) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

PointCloud transform_points(const Pose& pose, const PointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(pose * p);
  out.normals.reserve(cloud.normals.size());
  for (const auto& n : cloud.normals) out.normals.push_back(pose.rotation * n);
  return out;
}

}  // namespace vita
