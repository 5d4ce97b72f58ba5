#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "vita/geometry.hpp"

namespace vita {

struct Neighbor {
  std::size_t index = 0;
  double distance = std::numeric_limits<double>::infinity();
};

/// Static 3-d tree over a point set. Exact nearest neighbor; among points at
/// the same distance the lowest index wins, so results are reproducible
/// against an exhaustive scan.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);
  explicit KdTree(const PointCloud& cloud) : KdTree(cloud.points) {}

  /// Throws std::invalid_argument when the tree is empty.
  Neighbor nearest(const Vec3& query) const;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, double& best_d2, std::size_t& best_idx) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// One-shot query; builds a tree over `cloud`.
Neighbor nearest_neighbor(const Vec3& query, const PointCloud& cloud);

}  // namespace vita
