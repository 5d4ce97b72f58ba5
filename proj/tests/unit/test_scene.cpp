#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "oracle.hpp"
#include "vita/mesh.hpp"
#include "vita/random.hpp"
#include "vita/scene.hpp"

using namespace vita;

namespace {

Link make_link(std::string name, int parent, Pose origin, JointType type, Vec3 axis,
               std::optional<TriangleMesh> mesh = std::nullopt) {
  return {std::move(name), parent, origin, {type, axis.normalized()}, std::move(mesh)};
}

KinematicChain random_chain(Rng& rng) {
  std::vector<Link> links;
  links.push_back(make_link("root", -1, Pose::identity(), JointType::fixed, Vec3::UnitZ()));
  for (int i = 1; i <= 3; ++i) {
    const Pose origin{random_rotation(rng), Vec3(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2), 0.1)};
    const JointType type = i == 2 ? JointType::prismatic : JointType::revolute;
    links.push_back(make_link("l" + std::to_string(i), i - 1, origin, type, random_unit_vector(rng)));
  }
  return KinematicChain(std::move(links), {});
}

}  // namespace

TEST_CASE("forward kinematics at zero joints is the fixed-transform product") {
  Rng rng(1);
  const KinematicChain chain = random_chain(rng);
  const Pose base{random_rotation(rng), Vec3(0.1, 0.2, 0.3)};
  const std::vector<double> zeros(3, 0.0);
  const auto poses = forward_kinematics(chain, zeros, base);
  Pose acc = base;
  for (std::size_t i = 0; i < chain.links().size(); ++i) {
    acc = acc * chain.links()[i].origin;
    CHECK((poses[i].rotation - acc.rotation).norm() < 1e-12);
    CHECK((poses[i].translation - acc.translation).norm() < 1e-12);
  }
}

TEST_CASE("forward kinematics revolute half turn") {
  std::vector<Link> links{make_link("a", -1, Pose::identity(), JointType::fixed, Vec3::UnitZ()),
                          make_link("b", 0, Pose::identity(), JointType::revolute, Vec3::UnitZ())};
  const KinematicChain chain(std::move(links), {});
  const std::vector<double> q{std::numbers::pi};
  const auto poses = forward_kinematics(chain, q, Pose::identity());
  CHECK((poses[1] * Vec3::UnitX() - Vec3(-1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("forward kinematics matches homogeneous matrix products") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const KinematicChain chain = random_chain(rng);
    const std::vector<double> q{uniform(rng, -3, 3), uniform(rng, -0.1, 0.1), uniform(rng, -3, 3)};
    const Pose base{random_rotation(rng), Vec3(uniform(rng, -1, 1), 0, 0)};
    const auto a = forward_kinematics(chain, q, base);
    const auto b = oracle::matrix_fk(chain, q, base);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK((a[i].rotation - b[i].rotation).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((a[i].translation - b[i].translation).cwiseAbs().maxCoeff() < 1e-12);
    }
    const auto again = forward_kinematics(chain, q, base);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].rotation == again[i].rotation);
      CHECK(a[i].translation == again[i].translation);
    }
  }
}

TEST_CASE("forward kinematics rejects a wrong joint count") {
  Rng rng(3);
  const KinematicChain chain = random_chain(rng);
  const std::vector<double> two(2, 0.0);
  CHECK_THROWS_AS(forward_kinematics(chain, two, Pose::identity()), std::invalid_argument);
}

TEST_CASE("chain validation") {
  std::vector<Link> no_root{make_link("a", 0, Pose::identity(), JointType::fixed, Vec3::UnitZ())};
  CHECK_THROWS_AS(KinematicChain(no_root, {}), std::invalid_argument);
  std::vector<Link> bad_axis{make_link("a", -1, Pose::identity(), JointType::fixed, Vec3::UnitZ())};
  bad_axis.push_back({"b", 0, Pose::identity(), {JointType::revolute, Vec3(1, 1, 0)}, std::nullopt});
  CHECK_THROWS_AS(KinematicChain(bad_axis, {}), std::invalid_argument);
  std::vector<Link> ok{make_link("a", -1, Pose::identity(), JointType::fixed, Vec3::UnitZ())};
  CHECK_THROWS_AS(KinematicChain(ok, {TaxelMount{3, Pose::identity()}}), std::invalid_argument);
}

TEST_CASE("extract_contacts examples") {
  const std::vector<Pose> taxels{Pose::from_translation(Vec3(1, 2, 3)), Pose::from_translation(Vec3(4, 5, 6))};
  CHECK(extract_contacts({{0.1, 0.2}, 0.5}, taxels).empty());
  const PointCloud one = extract_contacts({{0.9, 0.1}, 0.5}, taxels);
  REQUIRE(one.size() == 1);
  CHECK(one.points[0] == Vec3(1, 2, 3));
}

TEST_CASE("extract_contacts equals a direct filter and is monotone in the threshold") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Pose> taxels;
    TactileReading r;
    for (int i = 0; i < 30; ++i) {
      taxels.push_back({random_rotation(rng), Vec3(uniform(rng), uniform(rng), uniform(rng))});
      r.values.push_back(uniform(rng));
    }
    r.binary_threshold = uniform(rng);
    std::vector<Vec3> expected;
    for (int i = 0; i < 30; ++i)
      if (r.values[i] > r.binary_threshold) expected.push_back(taxels[i].translation);
    CHECK(extract_contacts(r, taxels).points == expected);
    TactileReading higher = r;
    higher.binary_threshold = std::min(1.0, r.binary_threshold + 0.2);
    const auto hi = extract_contacts(higher, taxels).points;
    CHECK(hi.size() <= expected.size());
    for (const auto& p : hi) CHECK(std::find(expected.begin(), expected.end(), p) != expected.end());
  }
}

TEST_CASE("robot_point_cloud") {
  const TriangleMesh box = make_box(Vec3(0.02, 0.03, 0.04));
  std::vector<Link> one{make_link("a", -1, Pose::identity(), JointType::fixed, Vec3::UnitZ(), box)};
  const KinematicChain single(one, {});
  const std::vector<Pose> id{Pose::identity()};
  const PointCloud c = robot_point_cloud(single, id, 100, 9);
  CHECK(c.points == sample_mesh_surface(box, 100, 9).points);

  const std::vector<Pose> up{Pose::from_translation(Vec3(0, 0, 0.5))};
  const PointCloud shifted = robot_point_cloud(single, up, 100, 9);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK((shifted.points[i] - c.points[i] - Vec3(0, 0, 0.5)).norm() < 1e-12);

  std::vector<Link> two = one;
  two.push_back(make_link("b", 0, Pose::from_translation(Vec3(0.1, 0, 0)), JointType::revolute, Vec3::UnitZ(), box));
  const KinematicChain pair(two, {});
  const std::vector<double> q{0.3};
  CHECK(robot_point_cloud(pair, forward_kinematics(pair, q, Pose::identity()), 64, 1).size() == 128);

  std::vector<Link> bare{make_link("a", -1, Pose::identity(), JointType::fixed, Vec3::UnitZ())};
  CHECK_THROWS_AS(robot_point_cloud(KinematicChain(bare, {}), id, 10, 0), std::invalid_argument);
}

TEST_CASE("contact_patch") {
  Rng rng(5);
  const PointCloud object = sample_mesh_surface(make_sphere(0.05), 500, 3);
  CHECK(contact_patch(object, Pose::identity(), PointCloud{}, 0.05).empty());

  const Pose pose{random_rotation(rng), Vec3(0, 0, 0.5)};
  PointCloud tactile;
  tactile.points = {pose * object.points[17]};
  const auto patch = contact_patch(object, pose, tactile, 0.05);
  CHECK(std::find(patch.begin(), patch.end(), 17u) != patch.end());

  for (int trial = 0; trial < 20; ++trial) {
    PointCloud s;
    for (int i = 0; i < 6; ++i) s.points.push_back(pose * (random_unit_vector(rng) * uniform(rng, 0.04, 0.07)));
    const double th = uniform(rng, 0.001, 0.03);
    const auto a = contact_patch(object, pose, s, th);
    CHECK(a == oracle::exhaustive_patch(object, pose, s, th));
    const auto wider = contact_patch(object, pose, s, th * 1.5);
    CHECK(std::includes(wider.begin(), wider.end(), a.begin(), a.end()));
  }
}
