#include "vita/refiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vita {

void RefinementConfig::validate() const {
  if (!(attractive_stiffness >= 0.0) || !(repulsive_stiffness >= 0.0) || !(regularization >= 0.0)) {
    throw std::invalid_argument("RefinementConfig: stiffness and regularization must be non-negative");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("RefinementConfig: learning_rate must be positive");
  if (iterations < 1) throw std::invalid_argument("RefinementConfig: iterations must be at least 1");
  if (sample_count == 0) throw std::invalid_argument("RefinementConfig: sample_count must be positive");
  if (!(voxel_size > 0.0)) throw std::invalid_argument("RefinementConfig: voxel_size must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("RefinementConfig: invalid moment constants");
  }
  thresholds.validate();
}

SpringEnergy::SpringEnergy(const PointCloud& object_cloud, const KdTree& object_index, const Pose& base_pose,
                           const PointCloud& tactile, const PointCloud& robot, const RefinementConfig& config)
    : index_(object_index), base_(base_pose), tactile_(tactile), robot_(robot), config_(config) {
  if (object_cloud.empty()) throw std::invalid_argument("SpringEnergy: empty object cloud");
  if (object_index.size() != object_cloud.size()) {
    throw std::invalid_argument("SpringEnergy: index does not match object cloud");
  }
  if (!robot.empty() && !object_cloud.has_normals()) {
    throw std::invalid_argument("SpringEnergy: object cloud has no normals");
  }
  posed_points_.reserve(object_cloud.size());
  for (const auto& p : object_cloud.points) posed_points_.push_back(base_pose * p);
  if (object_cloud.has_normals()) {
    posed_normals_.reserve(object_cloud.size());
    for (const auto& n : object_cloud.normals) posed_normals_.push_back(base_pose.rotation * n);
  }
}

Correspondences SpringEnergy::correspond(const DeltaPose& delta) const {
  // Query in the body frame so the prebuilt index can be reused.
  const Pose to_body = (delta.to_pose() * base_).inverse();
  Correspondences c;
  if (!tactile_.empty()) {
    if (config_.per_taxel_attraction) {
      for (std::size_t j = 0; j < tactile_.size(); ++j) {
        c.springs.emplace_back(index_.nearest(to_body * tactile_.points[j]).index, j);
      }
    } else {
      double best = std::numeric_limits<double>::infinity();
      std::pair<std::size_t, std::size_t> pair{0, 0};
      for (std::size_t j = 0; j < tactile_.size(); ++j) {
        const Neighbor nb = index_.nearest(to_body * tactile_.points[j]);
        if (nb.distance < best) {
          best = nb.distance;
          pair = {nb.index, j};
        }
      }
      c.springs.push_back(pair);
    }
  }
  c.robot_to_object.reserve(robot_.size());
  for (const auto& r : robot_.points) c.robot_to_object.push_back(index_.nearest(to_body * r).index);
  return c;
}

double SpringEnergy::penetration_depth(const DeltaPose& delta, const Correspondences& corr) const {
  if (robot_.empty()) return 0.0;
  const Mat3 R = exp_map(delta.rotation_vector);
  double sum = 0.0;
  for (std::size_t i = 0; i < robot_.size(); ++i) {
    const std::size_t k = corr.robot_to_object[i];
    const Vec3 x = R * posed_points_[k] + delta.translation;
    sum += (x - robot_.points[i]).dot(R * posed_normals_[k]);
  }
  return sum / static_cast<double>(robot_.size());
}

EnergyBreakdown SpringEnergy::evaluate(const DeltaPose& delta, const Correspondences& corr) const {
  const Mat3 R = exp_map(delta.rotation_vector);
  EnergyBreakdown e;
  for (const auto& [i, j] : corr.springs) {
    const Vec3 x = R * posed_points_[i] + delta.translation;
    e.attractive += 0.5 * config_.attractive_stiffness * (x - tactile_.points[j]).squaredNorm();
  }
  if (!robot_.empty()) {
    if (config_.per_point_hinge) {
      double sum = 0.0;
      for (std::size_t n = 0; n < robot_.size(); ++n) {
        const std::size_t k = corr.robot_to_object[n];
        const Vec3 x = R * posed_points_[k] + delta.translation;
        const double f = (x - robot_.points[n]).dot(R * posed_normals_[k]);
        if (f > 0.0) sum += f * f;
      }
      e.repulsive = 0.5 * config_.repulsive_stiffness * sum / static_cast<double>(robot_.size());
    } else {
      e.repulsive = repulsive_energy(penetration_depth(delta, corr), config_.repulsive_stiffness);
    }
  }
  e.regularization = regularization(delta, config_.regularization);
  e.total = e.attractive + e.repulsive + e.regularization;
  return e;
}

Gradient6 SpringEnergy::gradient(const DeltaPose& delta, const Correspondences& corr) const {
  const Mat3 R = exp_map(delta.rotation_vector);
  const Mat3 Jt = right_jacobian(delta.rotation_vector).transpose();
  Vec3 g_rot = Vec3::Zero();
  Vec3 g_trans = Vec3::Zero();

  // d(Rq)/dw = -R [q]x J_r, so for a residual v = Rq + t - s:
  //   d(0.5|v|^2)/dw = J_r^T (q x R^T v).
  for (const auto& [i, j] : corr.springs) {
    const Vec3& q = posed_points_[i];
    const Vec3 v = R * q + delta.translation - tactile_.points[j];
    g_rot += config_.attractive_stiffness * (Jt * q.cross(R.transpose() * v));
    g_trans += config_.attractive_stiffness * v;
  }

  // Signed term f = (Rq + t - r) . (R m):
  //   df/dt = R m,  df/dw = J_r^T (q x m + m x R^T (Rq + t - r)).
  if (!robot_.empty() && config_.repulsive_stiffness > 0.0) {
    const double inv_n = 1.0 / static_cast<double>(robot_.size());
    auto term_gradient = [&](std::size_t n, double weight) {
      const std::size_t k = corr.robot_to_object[n];
      const Vec3& q = posed_points_[k];
      const Vec3& m = posed_normals_[k];
      const Vec3 u = R.transpose() * (R * q + delta.translation - robot_.points[n]);
      g_rot += weight * (Jt * (q.cross(m) + m.cross(u)));
      g_trans += weight * (R * m);
    };
    if (config_.per_point_hinge) {
      for (std::size_t n = 0; n < robot_.size(); ++n) {
        const std::size_t k = corr.robot_to_object[n];
        const double f = (R * posed_points_[k] + delta.translation - robot_.points[n]).dot(R * posed_normals_[k]);
        if (f > 0.0) term_gradient(n, config_.repulsive_stiffness * f * inv_n);
      }
    } else {
      const double gamma = penetration_depth(delta, corr);
      if (gamma > 0.0) {
        const double w = config_.repulsive_stiffness * gamma * inv_n;
        for (std::size_t n = 0; n < robot_.size(); ++n) term_gradient(n, w);
      }
    }
  }

  g_rot += 2.0 * config_.regularization * delta.rotation_vector;
  g_trans += 2.0 * config_.regularization * delta.translation;
  Gradient6 g;
  g << g_rot, g_trans;
  return g;
}

double attractive_energy(const DeltaPose& delta, const Pose& base_pose, const PointCloud& object_cloud,
                         const PointCloud& tactile, double k_a) {
  if (object_cloud.empty()) throw std::invalid_argument("attractive_energy: empty object cloud");
  if (tactile.empty()) return 0.0;
  const Pose full = delta.to_pose() * base_pose;
  const KdTree tree(tactile.points);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : object_cloud.points) {
    const Vec3 x = full * p;
    const Neighbor nb = tree.nearest(x);
    best = std::min(best, (x - tactile.points[nb.index]).squaredNorm());
  }
  return 0.5 * k_a * best;
}

double penetration_depth(const DeltaPose& delta, const Pose& base_pose, const PointCloud& object_cloud,
                         const PointCloud& robot) {
  if (!object_cloud.has_normals()) throw std::invalid_argument("penetration_depth: object cloud has no normals");
  if (robot.empty()) throw std::invalid_argument("penetration_depth: empty robot cloud");
  const PointCloud posed = transform_points(delta.to_pose() * base_pose, object_cloud);
  const KdTree tree(posed.points);
  double sum = 0.0;
  for (const auto& r : robot.points) {
    const std::size_t k = tree.nearest(r).index;
    sum += (posed.points[k] - r).dot(posed.normals[k]);
  }
  return sum / static_cast<double>(robot.size());
}

double repulsive_energy(double gamma, double k_r) {
  if (!(gamma > 0.0)) return 0.0;
  return 0.5 * k_r * gamma * gamma;
}

double regularization(const DeltaPose& delta, double lambda) { return lambda * delta.squared_norm(); }

DeltaPose init_delta(std::span<const Pose> prev, std::span<const Pose> now) {
  if (prev.size() != now.size()) throw std::invalid_argument("init_delta: taxel lists differ in length");
  DeltaPose d;
  if (now.empty()) return d;
  for (std::size_t i = 0; i < now.size(); ++i) d.translation += now[i].translation - prev[i].translation;
  d.translation /= static_cast<double>(now.size());
  return d;
}

DeltaPose init_delta(const Scene& scene) {
  if (!scene.previous) return {};
  const PreviousFrame& prev = *scene.previous;
  if (prev.taxel_poses.size() != scene.taxel_poses.size() || prev.activated.size() != scene.taxel_poses.size()) {
    return {};
  }
  const std::vector<bool> now_active = scene.reading.activated();
  std::vector<Pose> a;
  std::vector<Pose> b;
  for (std::size_t i = 0; i < scene.taxel_poses.size(); ++i) {
    if (prev.activated[i] && now_active[i]) {
      a.push_back(prev.taxel_poses[i]);
      b.push_back(scene.taxel_poses[i]);
    }
  }
  return init_delta(a, b);
}

namespace {

bool finite(const EnergyBreakdown& e) {
  return std::isfinite(e.attractive) && std::isfinite(e.repulsive) && std::isfinite(e.regularization) &&
         std::isfinite(e.total);
}

}  // namespace

RefinementResult refine(const Scene& scene, const Pose& visual_pose, const RefinementConfig& config) {
  config.validate();
  if (!scene.object) throw std::invalid_argument("refine: scene has no object model");
  const ObjectModel& object = *scene.object;
  const SpringEnergy model(object.cloud, object.index, visual_pose, scene.tactile, scene.robot.cloud, config);

  DeltaPose delta = config.use_initialization ? init_delta(scene) : DeltaPose{};
  Gradient6 m = Gradient6::Zero();
  Gradient6 v = Gradient6::Zero();
  RefinementResult out;
  out.trace.reserve(static_cast<std::size_t>(config.iterations));

  double b1t = 1.0;
  double b2t = 1.0;
  for (int it = 0; it < config.iterations; ++it) {
    const Correspondences corr = model.correspond(delta);
    const EnergyBreakdown e = model.evaluate(delta, corr);
    const Gradient6 g = model.gradient(delta, corr);
    out.trace.push_back({delta, e, g.norm()});
    if (it == 0) out.initial_energy = e;
    if (!finite(e) || !g.allFinite()) {
      throw NumericFailure("refine: non-finite energy at iteration " + std::to_string(it), out.trace);
    }

    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    b1t *= config.beta1;
    b2t *= config.beta2;
    const Gradient6 m_hat = m / (1.0 - b1t);
    const Gradient6 v_hat = v / (1.0 - b2t);
    const Gradient6 step = config.learning_rate * m_hat.cwiseQuotient((v_hat.cwiseSqrt().array() + config.epsilon).matrix());
    delta.rotation_vector -= step.head<3>();
    delta.translation -= step.tail<3>();
  }

  out.final_energy = model.evaluate(delta);
  if (!finite(out.final_energy)) throw NumericFailure("refine: non-finite final energy", out.trace);
  out.delta = delta;
  out.refined_pose = delta.to_pose() * visual_pose;
  return out;
}

void to_json(nlohmann::json& j, const RefinementConfig& c) {
  j = nlohmann::json{{"k_a", c.attractive_stiffness},
                     {"k_r", c.repulsive_stiffness},
                     {"lambda", c.regularization},
                     {"learning_rate", c.learning_rate},
                     {"iterations", c.iterations},
                     {"thresholds", c.thresholds},
                     {"sample_count", c.sample_count},
                     {"voxel_size", c.voxel_size},
                     {"use_initialization", c.use_initialization},
                     {"per_point_hinge", c.per_point_hinge},
                     {"per_taxel_attraction", c.per_taxel_attraction},
                     {"beta1", c.beta1},
                     {"beta2", c.beta2},
                     {"epsilon", c.epsilon}};
}

void from_json(const nlohmann::json& j, RefinementConfig& c) {
  if (!j.is_object()) throw std::invalid_argument("RefinementConfig: expected a JSON object");
  c.attractive_stiffness = j.value("k_a", c.attractive_stiffness);
  c.repulsive_stiffness = j.value("k_r", c.repulsive_stiffness);
  c.regularization = j.value("lambda", c.regularization);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.iterations = j.value("iterations", c.iterations);
  if (j.contains("thresholds")) j.at("thresholds").get_to(c.thresholds);
  c.sample_count = j.value("sample_count", c.sample_count);
  c.voxel_size = j.value("voxel_size", c.voxel_size);
  c.use_initialization = j.value("use_initialization", c.use_initialization);
  c.per_point_hinge = j.value("per_point_hinge", c.per_point_hinge);
  c.per_taxel_attraction = j.value("per_taxel_attraction", c.per_taxel_attraction);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
}

void to_json(nlohmann::json& j, const EnergyBreakdown& e) {
  j = nlohmann::json{
      {"attractive", e.attractive}, {"repulsive", e.repulsive}, {"regularization", e.regularization}, {"total", e.total}};
}

void to_json(nlohmann::json& j, const TraceEntry& t) {
  j = nlohmann::json{{"rotation_vector", {t.delta.rotation_vector.x(), t.delta.rotation_vector.y(),
                                          t.delta.rotation_vector.z()}},
                     {"translation", {t.delta.translation.x(), t.delta.translation.y(), t.delta.translation.z()}},
                     {"energy", t.energy},
                     {"gradient_norm", t.gradient_norm}};
}

}  // namespace vita
