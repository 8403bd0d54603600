#include "haploc/elevation_map.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace haploc {

ElevationMap::ElevationMap(Eigen::Vector2d origin, double resolution, int rows, int cols)
    : ElevationMap(origin, resolution, rows, cols,
                   std::vector<double>(size_t(rows) * size_t(cols),
                                       std::numeric_limits<double>::quiet_NaN())) {}

ElevationMap::ElevationMap(Eigen::Vector2d origin, double resolution, int rows,
                           int cols, std::vector<double> heights)
    : origin_(origin),
      resolution_(resolution),
      rows_(rows),
      cols_(cols),
      heights_(std::move(heights)) {
  if (resolution_ <= 0.0) throw std::invalid_argument("resolution must be > 0");
  if (rows_ <= 0 || cols_ <= 0) throw std::invalid_argument("grid size must be positive");
  if (heights_.size() != size_t(rows_) * size_t(cols_))
    throw std::invalid_argument("heights length does not match rows*cols");
}

bool ElevationMap::in_bounds(double x, double y) const {
  return x >= min_x() && x < max_x() && y >= min_y() && y < max_y();
}

std::optional<double> ElevationMap::elevation_at(double x, double y) const {
  if (!in_bounds(x, y)) return std::nullopt;
  int col = int(std::floor((x - origin_.x()) / resolution_));
  int row = int(std::floor((y - origin_.y()) / resolution_));
  col = std::min(col, cols_ - 1);
  row = std::min(row, rows_ - 1);
  double h = at(row, col);
  if (!std::isfinite(h)) return std::nullopt;
  return h;
}

bool ElevationMap::operator==(const ElevationMap& other) const {
  if (origin_ != other.origin_ || resolution_ != other.resolution_ ||
      rows_ != other.rows_ || cols_ != other.cols_)
    return false;
  for (size_t i = 0; i < heights_.size(); ++i) {
    bool nan_a = std::isnan(heights_[i]);
    bool nan_b = std::isnan(other.heights_[i]);
    if (nan_a != nan_b) return false;
    if (!nan_a && heights_[i] != other.heights_[i]) return false;
  }
  return true;
}

}  // namespace haploc
