#include <doctest.h>

#include <numbers>
#include <vector>

#include "vita/mesh.hpp"
#include "vita/metrics.hpp"
#include "vita/random.hpp"

using namespace vita;

TEST_CASE("add and adds examples") {
  const PointCloud cube = sample_mesh_surface(make_box(Vec3::Constant(0.1)), 500, 1);
  Rng rng(2);
  const Pose gt{random_rotation(rng), Vec3(0.1, 0.2, 0.5)};
  CHECK(add_error(gt, gt, cube) == 0.0);
  CHECK(adds_error(gt, gt, cube) == 0.0);
  const Pose shifted = gt * Pose::from_translation(Vec3(0.01, 0, 0));
  CHECK(add_error(shifted, gt, cube) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(add_error(gt, gt, PointCloud{}), std::invalid_argument);
  CHECK_THROWS_AS(adds_error(gt, gt, PointCloud{}), std::invalid_argument);
}

TEST_CASE("add equals a direct per-point average") {
  const PointCloud cube = sample_mesh_surface(make_box(Vec3::Constant(0.1)), 400, 3);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Pose gt{random_rotation(rng), Vec3(0, 0, 0.5)};
    const Pose est = gt * Pose{exp_map(random_unit_vector(rng) * uniform(rng, 0, 0.5)), Vec3::Zero()};
    double sum = 0.0;
    for (const auto& p : cube.points) {
      const Vec3 a = est.rotation * p + est.translation;
      const Vec3 b = gt.rotation * p + gt.translation;
      sum += std::sqrt((a - b).x() * (a - b).x() + (a - b).y() * (a - b).y() + (a - b).z() * (a - b).z());
    }
    CHECK(add_error(est, gt, cube) == doctest::Approx(sum / 400.0).epsilon(1e-12));
  }
}

TEST_CASE("adds ignores symmetric rotations") {
  PointCloud ring;
  for (int k = 0; k < 8; ++k) {
    const double a = k * std::numbers::pi / 4;
    ring.points.emplace_back(0.05 * std::cos(a), 0.05 * std::sin(a), 0.0);
  }
  const Pose gt = Pose::from_translation(Vec3(0, 0, 1));
  const Pose est{exp_map(Vec3(0, 0, std::numbers::pi / 4)), gt.translation};
  CHECK(adds_error(est, gt, ring) < 1e-12);
  CHECK(add_error(est, gt, ring) > 0.03);
}

TEST_CASE("adds never exceeds add") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    PointCloud c;
    const int n = 1 + static_cast<int>(uniform(rng, 0, 200));
    for (int k = 0; k < n; ++k) c.points.push_back(random_unit_vector(rng) * uniform(rng, 0, 0.1));
    const Pose gt{random_rotation(rng), random_unit_vector(rng)};
    const Pose est{random_rotation(rng), gt.translation + random_unit_vector(rng) * uniform(rng, 0, 0.1)};
    CHECK(adds_error(est, gt, c) <= add_error(est, gt, c));
  }
}

TEST_CASE("add under pure translation equals its length") {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    PointCloud c;
    for (int k = 0; k < 50; ++k) c.points.push_back(random_unit_vector(rng) * uniform(rng, 0, 1));
    const Vec3 d = random_unit_vector(rng) * uniform(rng, 0, 0.2);
    const Pose gt{random_rotation(rng), random_unit_vector(rng)};
    const Pose est{gt.rotation, gt.translation + d};
    const double len = (est.translation - gt.translation).norm();
    CHECK(add_error(est, gt, c) == len);
  }
}

TEST_CASE("auc") {
  const std::vector<double> zeros(5, 0.0);
  CHECK(auc(zeros, 0.1) == 1.0);
  const std::vector<double> big{0.1, 0.2, 5.0};
  CHECK(auc(big, 0.1) == 0.0);
  const std::vector<double> one{0.05};
  CHECK(auc(one, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(auc(std::vector<double>{}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(auc(one, 0.0), std::invalid_argument);

  Rng rng(7);
  std::vector<double> e;
  for (int i = 0; i < 100; ++i) e.push_back(uniform(rng, 0, 0.15));
  double prev = 0.0;
  for (double m = 0.01; m < 0.3; m += 0.01) {
    const double a = auc(e, m);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(a >= prev - 1e-12);
    prev = a;
  }
  std::vector<double> scaled;
  for (const double x : e) scaled.push_back(3.0 * x);
  CHECK(auc(scaled, 0.3) == doctest::Approx(auc(e, 0.1)).epsilon(1e-12));
}

TEST_CASE("position_error") {
  CHECK(position_error(Pose::identity(), Pose::identity()) == 0.0);
  CHECK(position_error(Pose::from_translation(Vec3(0.03, 0.04, 0)), Pose::identity()) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(position_error(Pose{exp_map(Vec3(1, 2, 3)), Vec3::Zero()}, Pose::identity()) == 0.0);
}
