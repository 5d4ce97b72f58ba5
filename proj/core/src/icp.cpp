#include "vita/icp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "vita/kdtree.hpp"

namespace vita {

void IcpConfig::validate() const {
  if (max_iterations < 1 || !(convergence_tol > 0.0) || !(max_correspondence_distance > 0.0)) {
    throw std::invalid_argument("IcpConfig: all parameters must be positive");
  }
}

void to_json(nlohmann::json& j, const IcpConfig& c) {
  j = nlohmann::json{{"max_iterations", c.max_iterations},
                     {"convergence_tol", c.convergence_tol},
                     {"max_correspondence_distance", c.max_correspondence_distance}};
}

void from_json(const nlohmann::json& j, IcpConfig& c) {
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  c.convergence_tol = j.value("convergence_tol", c.convergence_tol);
  c.max_correspondence_distance = j.value("max_correspondence_distance", c.max_correspondence_distance);
}

std::string_view to_string(IcpStatus s) {
  switch (s) {
    case IcpStatus::converged: return "converged";
    case IcpStatus::max_iterations: return "max_iterations";
    case IcpStatus::vacuous: return "vacuous";
    case IcpStatus::translation_only: return "translation_only";
    case IcpStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

Pose procrustes(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  if (from.empty() || from.size() != to.size()) throw std::invalid_argument("procrustes: size mismatch");
  const Vec3 ca = centroid(from);
  const Vec3 cb = centroid(to);
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) h += (from[i] - ca) * (to[i] - cb).transpose();
  const Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  return {r, cb - r * ca};
}

namespace {

struct Pairing {
  std::vector<Vec3> from;
  std::vector<Vec3> to;
  double rms = 0.0;
};

Pairing pair_up(const std::vector<Vec3>& source, const Pose& pose, const KdTree& target, double cutoff) {
  Pairing p;
  double sum = 0.0;
  for (const auto& s : source) {
    const Vec3 x = pose * s;
    const Neighbor nb = target.nearest(x);
    if (nb.distance > cutoff) continue;
    p.from.push_back(x);
    p.to.push_back(target.points()[nb.index]);
    sum += nb.distance * nb.distance;
  }
  if (!p.from.empty()) p.rms = std::sqrt(sum / static_cast<double>(p.from.size()));
  return p;
}

double residual(const Pairing& p, const Pose& step) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.from.size(); ++i) sum += (step * p.from[i] - p.to[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(p.from.size()));
}

}  // namespace

IcpResult icp_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target, const IcpConfig& config) {
  config.validate();
  IcpResult out;
  if (target.empty() || source.empty()) {
    out.status = IcpStatus::vacuous;
    return out;
  }
  const bool rigid = target.size() >= 3;
  const KdTree tree(target);
  Pose pose;
  Pose best = pose;
  double best_rms = std::numeric_limits<double>::infinity();
  double prev_rms = std::numeric_limits<double>::infinity();
  out.status = IcpStatus::max_iterations;

  for (int it = 0; it < config.max_iterations; ++it) {
    const Pairing p = pair_up(source, pose, tree, config.max_correspondence_distance);
    if (p.from.size() < 3) {
      out.status = IcpStatus::degenerate;
      break;
    }
    out.rms_history.push_back(p.rms);
    if (it == 0) out.initial_rms = p.rms;
    if (p.rms < best_rms) {
      best_rms = p.rms;
      best = pose;
    }
    if (std::abs(prev_rms - p.rms) < config.convergence_tol) {
      out.status = IcpStatus::converged;
      break;
    }
    prev_rms = p.rms;

    Pose step;
    if (rigid) {
      step = procrustes(p.from, p.to);
    } else {
      step = Pose::from_translation(centroid(p.to) - centroid(p.from));
    }
    pose = step * pose;
    out.iterations_used = it + 1;
    const double after = residual(p, step);
    if (after < best_rms) {
      best_rms = after;
      best = pose;
    }
    if (after <= config.convergence_tol) {
      out.status = IcpStatus::converged;
      break;
    }
  }

  out.transform = best;
  const Pairing final_pairs = pair_up(source, best, tree, config.max_correspondence_distance);
  out.final_rms = final_pairs.rms;
  if (!rigid && out.status != IcpStatus::degenerate) out.status = IcpStatus::translation_only;
  return out;
}

IcpRefinement icp_refine(const Scene& scene, const Pose& visual_pose, const IcpConfig& config) {
  if (!scene.object) throw std::invalid_argument("icp_refine: scene has no object model");
  std::vector<Vec3> source;
  source.reserve(scene.object->cloud.size());
  for (const auto& p : scene.object->cloud.points) source.push_back(visual_pose * p);
  IcpRefinement out;
  out.icp = icp_align(source, scene.tactile.points, config);
  out.refined_pose = out.icp.transform * visual_pose;
  return out;
}

}  // namespace vita
