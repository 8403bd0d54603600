#include "haploc/point_cloud.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace haploc {

PointCloudMap::PointCloudMap(std::vector<Vec3> points)
    : points_(std::make_unique<std::vector<Vec3>>(std::move(points))) {
  if (points_->empty()) throw std::invalid_argument("point cloud map needs at least one point");
  for (const Vec3& p : *points_)
    if (!p.allFinite()) throw std::invalid_argument("point cloud contains non-finite point");
  tree_ = KdTree(*points_);
}

PointCloudMap::Nearest PointCloudMap::nearest(const Vec3& query) const {
  KdTree::Result r = tree_.nearest(query);
  return {(*points_)[r.index], r.distance, r.index};
}

namespace {

std::int64_t voxel_key(double v, double spacing) {
  return std::int64_t(std::floor(v / spacing));
}

struct VoxelHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (std::int64_t v : k) {
      h ^= std::size_t(v);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace

std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& points, double spacing) {
  if (spacing <= 0.0) throw std::invalid_argument("voxel spacing must be > 0");
  std::unordered_set<std::array<std::int64_t, 3>, VoxelHash> seen;
  seen.reserve(points.size());
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) {
    std::array<std::int64_t, 3> key{voxel_key(p.x(), spacing), voxel_key(p.y(), spacing),
                                    voxel_key(p.z(), spacing)};
    if (seen.insert(key).second) out.push_back(p);
  }
  return out;
}

ElevationMap rasterize(const PointCloudMap& cloud, double resolution) {
  if (resolution <= 0.0) throw std::invalid_argument("resolution must be > 0");
  const std::vector<Vec3>& pts = cloud.points();

  Vec3 lo = pts.front();
  Vec3 hi = lo;
  for (const Vec3& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Eigen::Vector2d origin(lo.x(), lo.y());
  int cols = int(std::floor((hi.x() - lo.x()) / resolution)) + 1;
  int rows = int(std::floor((hi.y() - lo.y()) / resolution)) + 1;

  ElevationMap map(origin, resolution, rows, cols);
  for (const Vec3& p : pts) {
    int col = std::min(int(std::floor((p.x() - origin.x()) / resolution)), cols - 1);
    int row = std::min(int(std::floor((p.y() - origin.y()) / resolution)), rows - 1);
    double& cell = map.at(row, col);
    if (!std::isfinite(cell) || p.z() > cell) cell = p.z();
  }
  return map;
}

}  // namespace haploc
