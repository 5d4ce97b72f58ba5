#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "vita/geometry.hpp"

namespace vita {

using VoxelIndex = std::array<std::int64_t, 3>;

struct VoxelIndexHash {
  std::size_t operator()(const VoxelIndex& v) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto c : v) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Sparse occupancy grid. A point p lives in voxel floor((p - origin) / voxel_size).
class VoxelGrid {
 public:
  VoxelGrid(Vec3 origin, double voxel_size);

  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  std::size_t size() const { return occupied_.size(); }
  bool empty() const { return occupied_.empty(); }

  VoxelIndex index_of(const Vec3& p) const;
  Vec3 center(const VoxelIndex& idx) const;

  void insert(const VoxelIndex& idx) { occupied_.insert(idx); }
  void insert_point(const Vec3& p) { occupied_.insert(index_of(p)); }
  bool occupied(const VoxelIndex& idx) const { return occupied_.contains(idx); }
  bool contains(const Vec3& p) const { return occupied(index_of(p)); }

  /// Occupied indices in lexicographic order.
  std::vector<VoxelIndex> sorted_indices() const;
  std::vector<Vec3> centers() const;

 private:
  Vec3 origin_;
  double voxel_size_;
  std::unordered_set<VoxelIndex, VoxelIndexHash> occupied_;
};

/// Origin is the componentwise minimum of the points. Throws on
/// non-positive size or empty cloud.
VoxelGrid voxelize(const PointCloud& cloud, double voxel_size);
VoxelGrid voxelize(std::span<const Vec3> points, double voxel_size, const Vec3& origin);

}  // namespace vita
