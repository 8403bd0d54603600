#pragma once

#include "haploc/elevation_map.hpp"
#include "haploc/kd_tree.hpp"

#include <memory>
#include <vector>

namespace haploc {

/// Prior map as a 3D point cloud with a k-d tree index. Immutable after
/// construction; concurrent queries are safe.
class PointCloudMap {
 public:
  struct Nearest {
    Vec3 point;
    double distance;
    std::size_t index;
  };

  /// Throws std::invalid_argument on an empty cloud.
  explicit PointCloudMap(std::vector<Vec3> points);

  const std::vector<Vec3>& points() const { return *points_; }
  std::size_t size() const { return points_->size(); }

  /// Exact nearest map point and its Euclidean distance.
  Nearest nearest(const Vec3& query) const;

 private:
  // unique_ptr keeps the point storage at a stable address for the tree.
  std::unique_ptr<std::vector<Vec3>> points_;
  KdTree tree_;
};

/// Keeps the first point seen in each voxel of side `spacing`. Output order
/// follows first occurrence in the input. Default spacing 1 cm.
std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& points,
                                   double spacing = 0.01);

/// Projects a cloud to a 2.5D grid: per-cell max height, empty cells left
/// as no-data.
ElevationMap rasterize(const PointCloudMap& cloud, double resolution);

}  // namespace haploc
