#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "vita/feasibility.hpp"
#include "vita/random.hpp"
#include "vita/synth.hpp"

using namespace vita;

namespace {

std::size_t active_count(const std::vector<double>& values, std::size_t begin, std::size_t end, double threshold) {
  std::size_t n = 0;
  for (std::size_t i = begin; i < end; ++i) n += values[i] > threshold ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("antipodal fingertips on a sphere") {
  GraspSpec grasp;
  grasp.taxel_rows = 1;
  grasp.taxel_cols = 1;
  const GeneratedScene g = generate_scene({ShapeKind::sphere, Vec3(0.05, 0, 0), {}}, grasp, 3);
  REQUIRE(g.scene.taxel_poses.size() == 2);
  const auto active = g.scene.reading.activated();
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(active[i]);
    CHECK(std::abs((g.scene.taxel_poses[i].translation - g.ground_truth.translation).norm() - 0.05) < 1e-9);
  }
  const Vec3 a = g.scene.taxel_poses[0].translation - g.ground_truth.translation;
  const Vec3 b = g.scene.taxel_poses[1].translation - g.ground_truth.translation;
  CHECK((a + b).norm() < 1e-9);
}

TEST_CASE("a finger short of a box face stays inactive") {
  GraspSpec grasp;
  grasp.finger_gaps = {0.0, 0.02};
  const GeneratedScene g = generate_scene({ShapeKind::box, Vec3(0.06, 0.05, 0.04), {}}, grasp, 4);
  const std::size_t per = static_cast<std::size_t>(grasp.taxel_rows * grasp.taxel_cols);
  const auto& v = g.scene.reading.values;
  CHECK(active_count(v, 0, per, grasp.binary_threshold) == per);
  CHECK(active_count(v, per, 2 * per, grasp.binary_threshold) == 0);
}

TEST_CASE("an unreachable grasp is a generation error") {
  GraspSpec grasp;
  grasp.max_reach = 0.01;
  CHECK_THROWS_AS(generate_scene({ShapeKind::sphere, Vec3(0.05, 0, 0), {}}, grasp, 1), GenerationError);
  GraspSpec negative;
  negative.finger_gaps = {-0.01, 0.0};
  CHECK_THROWS_AS(generate_scene({ShapeKind::sphere, Vec3(0.05, 0, 0), {}}, negative, 1), GenerationError);
  CHECK_THROWS_AS(generate_scene({ShapeKind::sphere, Vec3(-0.05, 0, 0), {}}, GraspSpec{}, 1), std::invalid_argument);
}

TEST_CASE("generation is deterministic") {
  const ShapeSpec shape = random_shape(9);
  const GeneratedScene a = generate_scene(shape, default_grasp(shape, 9), 9);
  const GeneratedScene b = generate_scene(shape, default_grasp(shape, 9), 9);
  CHECK(a.ground_truth.rotation == b.ground_truth.rotation);
  CHECK(a.ground_truth.translation == b.ground_truth.translation);
  CHECK(a.scene.robot.cloud.points == b.scene.robot.cloud.points);
  CHECK(a.scene.object->cloud.points == b.scene.object->cloud.points);
  CHECK(a.scene.reading.values == b.scene.reading.values);
}

TEST_CASE("every generated ground truth is feasible") {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const ShapeSpec shape = random_shape(seed);
    const GeneratedScene g = generate_scene(shape, default_grasp(shape, seed), seed);
    if (!check_all(g.scene, g.ground_truth, {}).overall_pass) ++failures;
    if (seed % 100 == 0) CHECK(oracle::oracle_feasibility(g.scene, g.ground_truth, {}).overall_pass);
  }
  CHECK(failures == 0);
}

TEST_CASE("perturb_pose") {
  Rng rng(1);
  const Pose gt{random_rotation(rng), Vec3(0.1, 0.2, 0.5)};
  const Pose same = perturb_pose(gt, {0.0, 0.0, 0.0, 0.3}, 5);
  CHECK(same.rotation == gt.rotation);
  CHECK(same.translation == gt.translation);

  double sum[3] = {0, 0, 0};
  double sq[3] = {0, 0, 0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = perturb_pose(gt, {0.01, 0.0, 0.0, 0.3}, static_cast<std::uint64_t>(i)).translation - gt.translation;
    for (int k = 0; k < 3; ++k) {
      sum[k] += d[k];
      sq[k] += d[k] * d[k];
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[k] / n;
    const double sd = std::sqrt((sq[k] - n * mean * mean) / (n - 1));
    CHECK(std::abs(sd - 0.01) < 0.0005);
  }

  for (std::uint64_t s = 0; s < 100; ++s) {
    const Pose out = perturb_pose(gt, {0.01, 0.05, 1.0, 0.3}, s);
    CHECK(std::abs((out.translation - gt.translation).norm() - 0.3) < 1e-12);
    CHECK(out.is_valid());
  }
  NoiseModel bad;
  bad.dropout_probability = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("pick lifts the object 0.2 m") {
  const Trajectory t = simulate_trajectory(Scenario::pick, 12, 3);
  const double lift = t.frames.back().ground_truth.translation.z() - t.frames.front().ground_truth.translation.z();
  CHECK(std::abs(lift - 0.2) < 1e-6);
}

TEST_CASE("trajectories move in bounded steps and stay feasible") {
  for (const Scenario s : {Scenario::grasp, Scenario::pick, Scenario::handover}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const Trajectory t = simulate_trajectory(s, 10, seed);
      REQUIRE(t.frames.size() == 10);
      for (std::size_t f = 0; f < t.frames.size(); ++f) {
        if (f > 0) {
          CHECK((t.frames[f].ground_truth.translation - t.frames[f - 1].ground_truth.translation).norm() <= 0.05);
        }
        const auto prev = previous_record(t, f, f == 0 ? Pose{} : t.frames[f - 1].ground_truth, 0.05);
        CHECK(prev.has_value() == (f > 0));
        CHECK(check_all(frame_scene(t, f, prev), t.frames[f].ground_truth, {}).overall_pass);
      }
    }
  }
}

TEST_CASE("handover switches hands at the transfer frame") {
  const std::size_t n = 10;
  const Trajectory t = simulate_trajectory(Scenario::handover, n, 5);
  const std::size_t taxels = t.chain->taxels().size();
  const std::size_t half = taxels / 2;
  for (std::size_t f = 0; f < n; ++f) {
    const auto& v = t.frames[f].taxel_values;
    const std::size_t first = active_count(v, 0, half, t.binary_threshold);
    const std::size_t second = active_count(v, half, taxels, t.binary_threshold);
    if (f < n / 2) {
      CHECK(first > 0);
      CHECK(second == 0);
    } else {
      CHECK(first == 0);
      CHECK(second > 0);
    }
  }
}

TEST_CASE("two-frame trajectory") {
  const Trajectory t = simulate_trajectory(Scenario::grasp, 2, 1);
  CHECK(t.frames.size() == 2);
  CHECK_FALSE(previous_record(t, 0, t.frames[0].ground_truth, 0.05).has_value());
  CHECK(previous_record(t, 1, t.frames[0].ground_truth, 0.05).has_value());
  CHECK_THROWS_AS(simulate_trajectory(Scenario::grasp, 1, 1), std::invalid_argument);
}

TEST_CASE("scenario names") {
  CHECK(parse_scenario("pick") == Scenario::pick);
  CHECK(to_string(Scenario::handover) == "handover");
  CHECK_THROWS_AS(parse_scenario("juggle"), std::invalid_argument);
}
