#pragma once

#include "haploc/elevation_map.hpp"
#include "haploc/point_cloud.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace haploc {

/// File parse failure; message carries the 1-based line (and token offset
/// where it applies).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Elevation grid format, ASCII:
///   resolution <m>
///   origin <x> <y>
///   size <rows> <cols>
/// followed by rows*cols whitespace-separated heights, row-major; the token
/// `nan` marks a cell with no data. Doubles are written in shortest
/// round-trip form, so save/load is bit-exact.
ElevationMap load_elevation_map(std::istream& in);
void save_elevation_map(const ElevationMap& map, std::ostream& out);

ElevationMap load_elevation_map_file(const std::string& path);
void save_elevation_map_file(const ElevationMap& map, const std::string& path);

/// Point cloud format: one `x y z` triple per line, meters.
std::vector<Vec3> load_xyz(std::istream& in);
void save_xyz(const std::vector<Vec3>& points, std::ostream& out);

std::vector<Vec3> load_xyz_file(const std::string& path);
void save_xyz_file(const std::vector<Vec3>& points, const std::string& path);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

}  // namespace haploc
