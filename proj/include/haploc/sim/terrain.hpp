#pragma once

#include "haploc/elevation_map.hpp"

#include <variant>
#include <vector>

namespace haploc::sim {

/// Course segments laid end to end along +x, each entered at the exit base
/// height of the previous one (the course entry is at height 0).

/// Flat slab `height` above the running base; exits at the base.
struct Flat {
  double length;
  double height = 0.0;
};

/// Linear grade; exits at entry + length * tan(grade).
struct Ramp {
  double length;
  double grade_deg;
};

/// Triangular teeth on the running base: zero at tooth boundaries, peak
/// `tooth_height` at each tooth center. Length = pitch * count.
struct Chevron {
  double tooth_height;
  double pitch;
  int count;
};

/// Grid of square blocks of side `cell_size` on the running base. Heights
/// are row-major with rows spanning the course width; the number of columns
/// follows from the list length.
struct BlockField {
  double cell_size;
  std::vector<double> heights;
};

using TerrainSegment = std::variant<Flat, Ramp, Chevron, BlockField>;

struct TerrainSpec {
  std::vector<TerrainSegment> segments;
  double width = 1.0;            // course width in y, centered on y = 0
  double surround_margin = 3.0;  // flat apron (height 0) on every side

  double course_length() const;
};

/// The terrain course used by the default experiment configuration: an
/// ascending 12 degree ramp, a 13 cm chevron pattern, an asymmetric field of
/// uneven square blocks and a descending 12 degree ramp, 4.2 m in total.
TerrainSpec default_terrain_course();

/// Surface height of the course itself at longitudinal position x (y plays
/// a role only for block fields). `x` is measured from the course entry.
double course_height(const TerrainSpec& spec, double x, double y);

/// Rasterizes the course into an elevation map embedded in its flat
/// surround. Throws std::invalid_argument on degenerate segments.
ElevationMap build_terrain(const TerrainSpec& spec, double resolution);

}  // namespace haploc::sim
