#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "oracle.hpp"
#include "vita/geometry.hpp"
#include "vita/kdtree.hpp"
#include "vita/mesh.hpp"
#include "vita/random.hpp"
#include "vita/voxel_grid.hpp"

using namespace vita;

namespace {

Pose random_pose(Rng& rng, double spread = 1.0) {
  return {random_rotation(rng), Vec3(uniform(rng, -spread, spread), uniform(rng, -spread, spread),
                                     uniform(rng, -spread, spread))};
}

PointCloud random_cloud(Rng& rng, std::size_t n, double spread = 1.0) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.emplace_back(uniform(rng, -spread, spread), uniform(rng, -spread, spread), uniform(rng, -spread, spread));
  }
  return c;
}

}  // namespace

TEST_CASE("exp_map identity and quarter turn") {
  CHECK((exp_map(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
  const Vec3 y = exp_map(Vec3(0, 0, std::numbers::pi / 2)) * Vec3::UnitX();
  CHECK((y - Vec3::UnitY()).norm() < 1e-12);
}

TEST_CASE("exp_map matches integrated rotation flow") {
  const Vec3 w(0.1, 0.2, 0.3);
  CHECK((exp_map(w) - oracle::integrated_rotation(w)).cwiseAbs().maxCoeff() < 1e-9);
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const Vec3 v = random_unit_vector(rng) * uniform(rng, 0.0, 3.0);
    CHECK((exp_map(v) - oracle::integrated_rotation(v)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("exp_map small-angle consistency") {
  Rng rng(12);
  for (const double mag : {1e-12, 1e-9, 1e-6}) {
    const Vec3 w = random_unit_vector(rng) * mag;
    CHECK((exp_map(w) - (Mat3::Identity() + skew(w))).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(Pose{exp_map(w), Vec3::Zero()}.is_valid());
  }
}

TEST_CASE("exp_map rejects non-finite input") {
  CHECK_THROWS_AS(exp_map(Vec3(std::nan(""), 0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(exp_map(Vec3(0, INFINITY, 0)), std::invalid_argument);
}

TEST_CASE("exp_map always yields a rotation") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = random_unit_vector(rng) * uniform(rng, 0.0, 50.0);
    CHECK(Pose{exp_map(w), Vec3::Zero()}.is_valid());
  }
}

TEST_CASE("log_map inverts exp_map") {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const Vec3 w = random_unit_vector(rng) * uniform(rng, 0.0, 3.1);
    CHECK((log_map(exp_map(w)) - w).norm() < 1e-9);
  }
}

TEST_CASE("right Jacobian linearizes the exponential map") {
  Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    const Vec3 w = random_unit_vector(rng) * uniform(rng, 0.0, 2.0);
    const Vec3 d = random_unit_vector(rng) * 1e-6;
    const Mat3 lhs = exp_map(w + d);
    const Mat3 rhs = exp_map(w) * exp_map(right_jacobian(w) * d);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("pose composition and inverse") {
  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const Pose ab_c = (a * b) * c, a_bc = a * (b * c);
    CHECK((ab_c.rotation - a_bc.rotation).norm() < 1e-9);
    CHECK((ab_c.translation - a_bc.translation).norm() < 1e-9);
    const Pose id = a * a.inverse();
    CHECK((id.rotation - Mat3::Identity()).norm() < 1e-9);
    CHECK(id.translation.norm() < 1e-9);
    CHECK(a.is_valid());
  }
}

TEST_CASE("transform_points") {
  PointCloud c;
  c.points = {Vec3::Zero()};
  c.normals = {Vec3::UnitX()};
  const PointCloud moved = transform_points(Pose::from_translation(Vec3(0, 0, 1)), c);
  CHECK(moved.points[0] == Vec3(0, 0, 1));
  CHECK(moved.normals[0] == Vec3::UnitX());

  Rng rng(17);
  const PointCloud cloud = random_cloud(rng, 50);
  CHECK(transform_points(Pose::identity(), cloud).points == cloud.points);
  for (int i = 0; i < 20; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    const PointCloud once = transform_points(a * b, cloud);
    const PointCloud twice = transform_points(a, transform_points(b, cloud));
    const PointCloud back = transform_points(a.inverse(), transform_points(a, cloud));
    for (std::size_t k = 0; k < cloud.size(); ++k) {
      CHECK((once.points[k] - twice.points[k]).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((back.points[k] - cloud.points[k]).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("nearest_neighbor examples") {
  PointCloud c;
  c.points = {Vec3(1, 0, 0), Vec3(0, 2, 0)};
  const Neighbor n = nearest_neighbor(Vec3::Zero(), c);
  CHECK(n.index == 0);
  CHECK(n.distance == 1.0);
  const Neighbor self = nearest_neighbor(Vec3(0, 2, 0), c);
  CHECK(self.index == 1);
  CHECK(self.distance == 0.0);
  CHECK_THROWS_AS(nearest_neighbor(Vec3::Zero(), PointCloud{}), std::invalid_argument);
}

TEST_CASE("kd-tree equals exhaustive scan") {
  Rng rng(18);
  const PointCloud cloud = random_cloud(rng, 1000);
  const KdTree tree(cloud);
  for (int q = 0; q < 100; ++q) {
    const Vec3 query(uniform(rng, -1.2, 1.2), uniform(rng, -1.2, 1.2), uniform(rng, -1.2, 1.2));
    const Neighbor a = tree.nearest(query);
    const Neighbor b = oracle::exhaustive_nearest(query, cloud.points);
    CHECK(a.index == b.index);
    CHECK(a.distance == b.distance);
  }
}

TEST_CASE("kd-tree breaks ties by lowest index") {
  PointCloud c;
  c.points = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0)};
  CHECK(KdTree(c).nearest(Vec3::Zero()).index == 0);
  // Duplicates on a lattice: every query has many equidistant candidates.
  PointCloud lattice;
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k) lattice.points.emplace_back(i, j, k);
  const KdTree tree(lattice);
  Rng rng(19);
  for (int q = 0; q < 200; ++q) {
    const Vec3 query(0.5 * std::floor(uniform(rng, 0, 10)), 0.5 * std::floor(uniform(rng, 0, 10)),
                     0.5 * std::floor(uniform(rng, 0, 10)));
    CHECK(tree.nearest(query).index == oracle::exhaustive_nearest(query, lattice.points).index);
  }
}

TEST_CASE("sample_mesh_surface spreads by area") {
  const TriangleMesh cube = make_box(Vec3::Ones());
  const PointCloud s = sample_mesh_surface(cube, 6000, 5);
  REQUIRE(s.size() == 6000);
  REQUIRE(s.has_normals());
  std::map<std::tuple<int, int, int>, int> per_face;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3& n = s.normals[i];
    CHECK(std::abs(n.norm() - 1.0) < 1e-6);
    CHECK(std::abs(s.points[i].dot(n) - 0.5) < 1e-12);  // on the face, normal outward
    ++per_face[{static_cast<int>(std::lround(n.x())), static_cast<int>(std::lround(n.y())),
                static_cast<int>(std::lround(n.z()))}];
  }
  CHECK(per_face.size() == 6);
  for (const auto& [face, count] : per_face) {
    CHECK(count >= 950);
    CHECK(count <= 1050);
  }
}

TEST_CASE("sample_mesh_surface single triangle and determinism") {
  TriangleMesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  tri.triangles = {{0, 1, 2}};
  const Vec3 p = sample_mesh_surface(tri, 1, 3).points[0];
  CHECK(p.z() == 0.0);
  CHECK(p.x() >= 0.0);
  CHECK(p.y() >= 0.0);
  CHECK(p.x() + p.y() <= 1.0);

  const TriangleMesh sphere = make_sphere(0.05);
  const PointCloud a = sample_mesh_surface(sphere, 500, 42);
  const PointCloud b = sample_mesh_surface(sphere, 500, 42);
  CHECK(a.points == b.points);
  CHECK(a.normals == b.normals);
}

TEST_CASE("sample_mesh_surface rejects degenerate meshes") {
  TriangleMesh flat;
  flat.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  flat.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_mesh_surface(flat, 10, 0), std::invalid_argument);
  TriangleMesh bad;
  bad.vertices = {Vec3(0, 0, 0)};
  bad.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("generated meshes have outward winding") {
  for (const TriangleMesh& m : {make_box(Vec3(0.1, 0.2, 0.3)), make_sphere(0.05), make_cylinder(0.03, 0.1)}) {
    m.validate();
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : m.vertices) centroid += v;
    centroid /= static_cast<double>(m.vertices.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const Vec3 c = (m.vertices[m.triangles[t][0]] + m.vertices[m.triangles[t][1]] + m.vertices[m.triangles[t][2]]) / 3;
      CHECK(m.face_normal(t).dot(c - centroid) > 0.0);
    }
  }
}

TEST_CASE("voxelize examples") {
  PointCloud a;
  a.points = {Vec3(0, 0, 0), Vec3(0.001, 0, 0)};
  CHECK(voxelize(a, 0.01).size() == 1);
  PointCloud b;
  b.points = {Vec3(0, 0, 0), Vec3(0.02, 0, 0)};
  CHECK(voxelize(b, 0.01).size() == 2);
  CHECK_THROWS_AS(voxelize(a, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(voxelize(a, -1.0), std::invalid_argument);
}

TEST_CASE("voxelize equals direct index set") {
  Rng rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud c = random_cloud(rng, 3000, 0.1);
    const double s = uniform(rng, 0.003, 0.03);
    const VoxelGrid g = voxelize(c, s);
    Vec3 lo = c.points[0];
    for (const auto& p : c.points) lo = lo.cwiseMin(p);
    CHECK(g.origin() == lo);
    std::set<std::tuple<long long, long long, long long>> direct;
    for (const auto& p : c.points) {
      direct.insert({static_cast<long long>(std::floor((p.x() - lo.x()) / s)),
                     static_cast<long long>(std::floor((p.y() - lo.y()) / s)),
                     static_cast<long long>(std::floor((p.z() - lo.z()) / s))});
    }
    CHECK(g.size() == direct.size());
    for (const auto& p : c.points) CHECK(g.contains(p));
  }
}
