#pragma once

#include "haploc/geometry.hpp"

#include <optional>
#include <vector>

namespace haploc {

/// 2.5D elevation grid. Cell (row, col) covers
///   x in [origin.x + col*res, origin.x + (col+1)*res)
///   y in [origin.y + row*res, origin.y + (row+1)*res)
/// Heights are stored row-major; NaN marks a cell with no data.
class ElevationMap {
 public:
  ElevationMap(Eigen::Vector2d origin, double resolution, int rows, int cols);
  ElevationMap(Eigen::Vector2d origin, double resolution, int rows, int cols,
               std::vector<double> heights);

  const Eigen::Vector2d& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<double>& heights() const { return heights_; }

  double& at(int row, int col) { return heights_[size_t(row) * cols_ + col]; }
  double at(int row, int col) const { return heights_[size_t(row) * cols_ + col]; }
  bool has_data(int row, int col) const { return std::isfinite(at(row, col)); }

  bool in_bounds(double x, double y) const;

  /// Height of the cell containing (x, y). Nearest-cell lookup, no
  /// interpolation. Empty if (x, y) is outside the grid or the cell holds
  /// no data.
  std::optional<double> elevation_at(double x, double y) const;

  double min_x() const { return origin_.x(); }
  double min_y() const { return origin_.y(); }
  double max_x() const { return origin_.x() + cols_ * resolution_; }
  double max_y() const { return origin_.y() + rows_ * resolution_; }

  bool operator==(const ElevationMap& other) const;

 private:
  Eigen::Vector2d origin_;
  double resolution_;
  int rows_;
  int cols_;
  std::vector<double> heights_;
};

}  // namespace haploc
