#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vita/geometry.hpp"
#include "vita/scene.hpp"

namespace vita {

struct IcpConfig {
  int max_iterations = 50;
  double convergence_tol = 1e-6;            // change in RMS residual, m
  double max_correspondence_distance = 0.1;  // m

  void validate() const;
};

void to_json(nlohmann::json& j, const IcpConfig& c);
void from_json(const nlohmann::json& j, IcpConfig& c);

enum class IcpStatus {
  converged,
  max_iterations,
  vacuous,           // no target points, input returned unchanged
  translation_only,  // fewer than 3 target points, rotation unobservable
  degenerate,        // fewer than 3 correspondences; best pose so far returned
};

std::string_view to_string(IcpStatus s);

struct IcpResult {
  Pose transform;  // maps the source into alignment with the target
  double initial_rms = 0.0;
  double final_rms = 0.0;
  int iterations_used = 0;
  IcpStatus status = IcpStatus::converged;
  std::vector<double> rms_history;  // residual at the start of each iteration
};

/// Least-squares rigid transform taking `from[i]` onto `to[i]` (Kabsch with
/// reflection correction). Requires equal, non-empty lengths.
Pose procrustes(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

/// Point-to-point ICP of `source` onto `target`.
IcpResult icp_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target, const IcpConfig& config);

struct IcpRefinement {
  Pose refined_pose;
  IcpResult icp;
};

/// Registers the visually posed object cloud to the tactile cloud and returns
/// T_delta * visual_pose. The robot model is ignored.
IcpRefinement icp_refine(const Scene& scene, const Pose& visual_pose, const IcpConfig& config);

}  // namespace vita
