#include "haploc/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace haploc {

KdTree::KdTree(const std::vector<Vec3>& points) : points_(&points) {
  indices_.resize(points.size());
  std::iota(indices_.begin(), indices_.end(), std::size_t{0});
  if (!indices_.empty()) {
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    root_ = build(0, indices_.size(), points);
  }
}

int KdTree::build(std::size_t begin, std::size_t end, const std::vector<Vec3>& points) {
  int node_id = int(nodes_.size());
  nodes_.emplace_back();

  if (end - begin <= std::size_t(kLeafSize)) {
    nodes_[node_id].begin = int(begin);
    nodes_[node_id].end = int(end);
    return node_id;
  }

  Vec3 lo = points[indices_[begin]];
  Vec3 hi = lo;
  for (std::size_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points[indices_[i]]);
    hi = hi.cwiseMax(points[indices_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(indices_.begin() + begin, indices_.begin() + mid,
                   indices_.begin() + end, [&](std::size_t a, std::size_t b) {
                     return points[a](axis) < points[b](axis);
                   });
  double split = points[indices_[mid]](axis);

  int left = build(begin, mid, points);
  int right = build(mid, end, points);
  nodes_[node_id].child_left = left;
  nodes_[node_id].child_right = right;
  nodes_[node_id].split_axis = axis;
  nodes_[node_id].split_value = split;
  return node_id;
}

KdTree::Result KdTree::nearest(const Vec3& query) const {
  if (empty()) throw std::invalid_argument("nearest query on empty kd-tree");
  Result best{0, std::numeric_limits<double>::infinity()};
  search(root_, query, best);
  return best;
}

void KdTree::search(int node_id, const Vec3& query, Result& best) const {
  const Node& node = nodes_[node_id];
  if (node.child_right < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      std::size_t idx = indices_[i];
      double d = ((*points_)[idx] - query).norm();
      if (d < best.distance || (d == best.distance && idx < best.index)) {
        best.distance = d;
        best.index = idx;
      }
    }
    return;
  }

  double delta = query(node.split_axis) - node.split_value;
  int near = delta < 0.0 ? node.child_left : node.child_right;
  int far = delta < 0.0 ? node.child_right : node.child_left;
  search(near, query, best);
  // The far side can still hold an equal-distance point with a lower index.
  if (std::abs(delta) <= best.distance) search(far, query, best);
}

}  // namespace haploc
