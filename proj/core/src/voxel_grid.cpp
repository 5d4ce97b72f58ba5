#include "vita/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vita {

VoxelGrid::VoxelGrid(Vec3 origin, double voxel_size) : origin_(std::move(origin)), voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw std::invalid_argument("VoxelGrid: voxel_size must be positive");
  }
}

VoxelIndex VoxelGrid::index_of(const Vec3& p) const {
  const Vec3 rel = (p - origin_) / voxel_size_;
  return {static_cast<std::int64_t>(std::floor(rel.x())), static_cast<std::int64_t>(std::floor(rel.y())),
          static_cast<std::int64_t>(std::floor(rel.z()))};
}

Vec3 VoxelGrid::center(const VoxelIndex& idx) const {
  return origin_ + voxel_size_ * Vec3(static_cast<double>(idx[0]) + 0.5, static_cast<double>(idx[1]) + 0.5,
                                      static_cast<double>(idx[2]) + 0.5);
}

std::vector<VoxelIndex> VoxelGrid::sorted_indices() const {
  std::vector<VoxelIndex> out(occupied_.begin(), occupied_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vec3> VoxelGrid::centers() const {
  std::vector<Vec3> out;
  out.reserve(occupied_.size());
  for (const auto& idx : sorted_indices()) out.push_back(center(idx));
  return out;
}

VoxelGrid voxelize(std::span<const Vec3> points, double voxel_size, const Vec3& origin) {
  VoxelGrid grid(origin, voxel_size);
  for (const auto& p : points) grid.insert_point(p);
  return grid;
}

VoxelGrid voxelize(const PointCloud& cloud, double voxel_size) {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxelize: voxel_size must be positive");
  if (cloud.empty()) throw std::invalid_argument("voxelize: empty cloud");
  Vec3 lo = cloud.points.front();
  for (const auto& p : cloud.points) lo = lo.cwiseMin(p);
  return voxelize(cloud.points, voxel_size, lo);
}

}  // namespace vita
