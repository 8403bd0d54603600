#include "haploc/sim/terrain.hpp"

#include <cmath>
#include <stdexcept>

namespace haploc::sim {

namespace {

double segment_length(const TerrainSegment& seg, double width) {
  return std::visit(
      [width](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat> || std::is_same_v<T, Ramp>) {
          return s.length;
        } else if constexpr (std::is_same_v<T, Chevron>) {
          return s.pitch * s.count;
        } else {
          int rows = std::max(1, int(std::floor(width / s.cell_size)));
          int cols = int((s.heights.size() + rows - 1) / rows);
          return cols * s.cell_size;
        }
      },
      seg);
}

void validate_segment(const TerrainSegment& seg) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat>) {
          if (!(s.length > 0.0) || !std::isfinite(s.height))
            throw std::invalid_argument("flat segment needs length > 0 and finite height");
        } else if constexpr (std::is_same_v<T, Ramp>) {
          if (!(s.length > 0.0) || !(std::abs(s.grade_deg) < 90.0))
            throw std::invalid_argument("ramp needs length > 0 and |grade| < 90 deg");
        } else if constexpr (std::is_same_v<T, Chevron>) {
          if (!(s.pitch > 0.0) || s.count < 1 || !(s.tooth_height > 0.0))
            throw std::invalid_argument("chevron needs pitch > 0, count >= 1, height > 0");
        } else {
          if (!(s.cell_size > 0.0) || s.heights.empty())
            throw std::invalid_argument("block field needs cell_size > 0 and heights");
          for (double h : s.heights)
            if (!std::isfinite(h)) throw std::invalid_argument("block height not finite");
        }
      },
      seg);
}

double segment_exit_base(const TerrainSegment& seg, double entry_base) {
  if (const Ramp* r = std::get_if<Ramp>(&seg))
    return entry_base + r->length * std::tan(r->grade_deg * M_PI / 180.0);
  return entry_base;
}

double segment_height(const TerrainSegment& seg, double entry_base, double t, double y,
                      double width) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat>) {
          return entry_base + s.height;
        } else if constexpr (std::is_same_v<T, Ramp>) {
          return entry_base + t * std::tan(s.grade_deg * M_PI / 180.0);
        } else if constexpr (std::is_same_v<T, Chevron>) {
          double u = t / s.pitch - std::floor(t / s.pitch);
          return entry_base + s.tooth_height * (1.0 - std::abs(2.0 * u - 1.0));
        } else {
          int rows = std::max(1, int(std::floor(width / s.cell_size)));
          int cols = int((s.heights.size() + rows - 1) / rows);
          int col = std::min(int(std::floor(t / s.cell_size)), cols - 1);
          int row =
              std::clamp(int(std::floor((y + width / 2.0) / s.cell_size)), 0, rows - 1);
          size_t idx = size_t(row) * cols + col;
          return entry_base + (idx < s.heights.size() ? s.heights[idx] : 0.0);
        }
      },
      seg);
}

}  // namespace

double TerrainSpec::course_length() const {
  double total = 0.0;
  for (const TerrainSegment& seg : segments) total += segment_length(seg, width);
  return total;
}

TerrainSpec default_terrain_course() {
  TerrainSpec spec;
  spec.width = 1.0;
  spec.segments.push_back(Ramp{1.0, 12.0});
  spec.segments.push_back(Chevron{0.13, 0.3, 4});
  // 4x4 uneven blocks, 0.25 m cells; deliberately without any symmetry.
  spec.segments.push_back(BlockField{
      0.25,
      {0.04, 0.09, 0.02, 0.07, 0.11, 0.03, 0.08, 0.05, 0.02, 0.10, 0.06, 0.01, 0.07,
       0.03, 0.09, 0.12}});
  spec.segments.push_back(Ramp{1.0, -12.0});
  return spec;
}

double course_height(const TerrainSpec& spec, double x, double y) {
  double base = 0.0;
  double x0 = 0.0;
  for (const TerrainSegment& seg : spec.segments) {
    double len = segment_length(seg, spec.width);
    if (x >= x0 && x < x0 + len) return segment_height(seg, base, x - x0, y, spec.width);
    base = segment_exit_base(seg, base);
    x0 += len;
  }
  return 0.0;
}

ElevationMap build_terrain(const TerrainSpec& spec, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");
  if (!(spec.width > 0.0)) throw std::invalid_argument("course width must be > 0");
  if (!(spec.surround_margin >= 0.0))
    throw std::invalid_argument("surround margin must be >= 0");
  if (spec.segments.empty()) throw std::invalid_argument("terrain spec has no segments");
  for (const TerrainSegment& seg : spec.segments) validate_segment(seg);

  const double length = spec.course_length();
  const double m = spec.surround_margin;
  const Eigen::Vector2d origin(-m, -spec.width / 2.0 - m);
  const int cols = int(std::ceil((length + 2.0 * m) / resolution));
  const int rows = int(std::ceil((spec.width + 2.0 * m) / resolution));

  ElevationMap map(origin, resolution, rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double x = origin.x() + (c + 0.5) * resolution;
      double y = origin.y() + (r + 0.5) * resolution;
      bool on_course =
          x >= 0.0 && x < length && y >= -spec.width / 2.0 && y < spec.width / 2.0;
      map.at(r, c) = on_course ? course_height(spec, x, y) : 0.0;
    }
  }
  return map;
}

}  // namespace haploc::sim
