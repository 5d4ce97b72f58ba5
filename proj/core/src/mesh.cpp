#include "vita/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <utility>

#include "vita/random.hpp"

namespace vita {

void TriangleMesh::validate() const {
  const auto n = vertices.size();
  for (const auto& tri : triangles) {
    for (const auto idx : tri) {
      if (idx >= n) throw std::invalid_argument("TriangleMesh: triangle index out of range");
    }
  }
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw std::invalid_argument("TriangleMesh: non-finite vertex");
  }
  if (!(area() > 0.0)) throw std::invalid_argument("TriangleMesh: degenerate mesh (zero surface area)");
}

double TriangleMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec3& a = vertices[tri[0]];
  return 0.5 * (vertices[tri[1]] - a).cross(vertices[tri[2]] - a).norm();
}

double TriangleMesh::area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

Vec3 TriangleMesh::face_normal(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec3& a = vertices[tri[0]];
  const Vec3 n = (vertices[tri[1]] - a).cross(vertices[tri[2]] - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

Vec3 TriangleMesh::support(const Vec3& d) const {
  Vec3 best = vertices.front();
  double best_dot = best.dot(d);
  for (const auto& v : vertices) {
    if (v.dot(d) > best_dot) {
      best_dot = v.dot(d);
      best = v;
    }
  }
  return best;
}

TriangleMesh transform_mesh(const Pose& pose, const TriangleMesh& mesh) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = pose * v;
  return out;
}

TriangleMesh merge_meshes(const TriangleMesh& a, const TriangleMesh& b) {
  TriangleMesh out = a;
  const auto offset = static_cast<std::uint32_t>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& tri : b.triangles) out.triangles.push_back({tri[0] + offset, tri[1] + offset, tri[2] + offset});
  return out;
}

TriangleMesh make_box(const Vec3& size, const Vec3& center) {
  const Vec3 h = 0.5 * size;
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back(center.x() + ((i & 1) ? h.x() : -h.x()), center.y() + ((i & 2) ? h.y() : -h.y()),
                            center.z() + ((i & 4) ? h.z() : -h.z()));
  }
  // Two triangles per face, counter-clockwise seen from outside.
  m.triangles = {{0, 4, 6}, {0, 6, 2},   // -x
                 {1, 3, 7}, {1, 7, 5},   // +x
                 {0, 1, 5}, {0, 5, 4},   // -y
                 {2, 6, 7}, {2, 7, 3},   // +y
                 {0, 2, 3}, {0, 3, 1},   // -z
                 {4, 5, 7}, {4, 7, 6}};  // +z
  return m;
}

TriangleMesh make_sphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      const auto idx = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& tri : m.triangles) {
      const auto ab = midpoint(tri[0], tri[1]);
      const auto bc = midpoint(tri[1], tri[2]);
      const auto ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  TriangleMesh m;
  const double hz = 0.5 * height;
  const auto seg = static_cast<std::uint32_t>(segments);
  for (std::uint32_t i = 0; i < seg; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const auto bottom = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, -hz);
  const auto top = bottom + 1;
  m.vertices.emplace_back(0.0, 0.0, hz);
  for (std::uint32_t i = 0; i < seg; ++i) {
    const std::uint32_t j = (i + 1) % seg;
    const std::uint32_t b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({b0, t1, t0});
    m.triangles.push_back({bottom, b1, b0});
    m.triangles.push_back({top, t0, t1});
  }
  return m;
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_mesh_surface: n must be >= 1");
  mesh.validate();
  std::vector<double> cumulative(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) cumulative[t] = mesh.triangle_area(t);
  std::partial_sum(cumulative.begin(), cumulative.end(), cumulative.begin());
  const double total = cumulative.back();

  Rng rng(seed);
  PointCloud out;
  out.points.reserve(n);
  out.normals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform(rng, 0.0, total);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto t = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
    t = std::min(t, mesh.triangles.size() - 1);
    while (mesh.triangle_area(t) == 0.0 && t + 1 < mesh.triangles.size()) ++t;

    const double r1 = std::sqrt(uniform(rng));
    const double r2 = uniform(rng);
    const auto& tri = mesh.triangles[t];
    const Vec3 p = (1.0 - r1) * mesh.vertices[tri[0]] + r1 * (1.0 - r2) * mesh.vertices[tri[1]] +
                   r1 * r2 * mesh.vertices[tri[2]];
    out.points.push_back(p);
    out.normals.push_back(mesh.face_normal(t));
  }
  return out;
}

namespace {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

SurfacePoint closest_surface_point(const TriangleMesh& mesh, const Vec3& query) {
  SurfacePoint best{Vec3::Zero(), 0, std::numeric_limits<double>::infinity()};
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 q = closest_on_triangle(query, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    const double d = (q - query).norm();
    if (d < best.distance) best = {q, t, d};
  }
  return best;
}

}  // namespace vita
