#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vita/geometry.hpp"

namespace vita {

/// Triangle soup with shared vertices; counter-clockwise winding seen from
/// outside, so face normals point outward.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  /// Throws std::invalid_argument on out-of-range indices or zero area.
  void validate() const;

  double area() const;
  double triangle_area(std::size_t t) const;
  Vec3 face_normal(std::size_t t) const;
  Vec3 support(const Vec3& direction) const;  // farthest vertex along direction
};

TriangleMesh transform_mesh(const Pose& pose, const TriangleMesh& mesh);
TriangleMesh merge_meshes(const TriangleMesh& a, const TriangleMesh& b);

/// Axis-aligned box with the given full extents, centered at `center`.
TriangleMesh make_box(const Vec3& size, const Vec3& center = Vec3::Zero());
/// Icosphere; 3 subdivisions gives 1280 faces.
TriangleMesh make_sphere(double radius, int subdivisions = 3);
/// Closed cylinder along z, centered at the origin.
TriangleMesh make_cylinder(double radius, double height, int segments = 48);

/// Area-weighted surface samples, each carrying its source triangle's
/// outward unit normal. Deterministic for a fixed seed.
PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Closest point on the mesh surface; also reports the triangle it lies on.
struct SurfacePoint {
  Vec3 point;
  std::size_t triangle = 0;
  double distance = 0.0;
};
SurfacePoint closest_surface_point(const TriangleMesh& mesh, const Vec3& query);

class MeshIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ASCII OBJ (v/f records, 1-based or negative indices; polygons are fanned).
TriangleMesh load_obj(const std::filesystem::path& path);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
/// Binary little-endian PLY: float32 x/y/z vertices, int32 face index lists.
TriangleMesh load_ply(const std::filesystem::path& path);
void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path);
/// Dispatches on extension (.obj / .ply).
TriangleMesh load_mesh(const std::filesystem::path& path);

}  // namespace vita
