#pragma once

// Shared scene builders for unit and acceptance tests.

#include <cstdint>

#include "vita/random.hpp"
#include "vita/scene.hpp"
#include "vita/synth.hpp"

namespace vita::testing {

struct Case {
  GeneratedScene generated;
  Pose pose;  // candidate estimate to check or refine
};

/// Generated grasp with a random shape plus a perturbed estimate. Every
/// other case carries a previous-frame record so the kinematic check runs.
inline Case random_case(std::uint64_t seed, const NoiseModel& noise = {0.02, 0.1, 0.0, 0.3},
                        const ObjectSampling& sampling = {}) {
  const ShapeSpec shape = random_shape(derive_seed(seed, {100}));
  GeneratedScene g = generate_scene(shape, default_grasp(shape, derive_seed(seed, {101})), seed, sampling);
  if (seed % 2 == 1) {
    const Pose prev = perturb_pose(g.ground_truth, {0.005, 0.05, 0.0, 0.3}, derive_seed(seed, {102}));
    g.scene.previous = make_previous_frame(g.scene, prev, Thresholds{}.contact);
  }
  const Pose pose = perturb_pose(g.ground_truth, noise, derive_seed(seed, {103}));
  return {std::move(g), pose};
}

}  // namespace vita::testing
