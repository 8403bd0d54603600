#pragma once

#include "haploc/geometry.hpp"

#include <cstddef>
#include <vector>

namespace haploc {

/// Exact nearest-neighbor search over 3D points. Median split on the widest
/// axis of each node's bounding box, leaf size 16. Distance ties are broken
/// by the lowest point index so queries are deterministic regardless of how
/// the split permuted equal coordinates.
class KdTree {
 public:
  struct Result {
    std::size_t index;
    double distance;
  };

  static constexpr int kLeafSize = 16;

  KdTree() = default;
  /// Builds over `points`; the tree keeps a reference, the caller must keep
  /// the vector alive and unchanged.
  explicit KdTree(const std::vector<Vec3>& points);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  /// Throws std::invalid_argument on an empty tree.
  Result nearest(const Vec3& query) const;

 private:
  struct Node {
    // Leaf when child_right == -1: [begin, end) into indices_.
    int child_left = -1;
    int child_right = -1;
    int begin = 0;
    int end = 0;
    int split_axis = 0;
    double split_value = 0.0;
  };

  int build(std::size_t begin, std::size_t end, const std::vector<Vec3>& points);
  void search(int node_id, const Vec3& query, Result& best) const;

  const std::vector<Vec3>* points_ = nullptr;
  std::vector<std::size_t> indices_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace haploc
