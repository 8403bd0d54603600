#include "haploc/map_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace haploc {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  return f;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  return f;
}

// Line-oriented tokenizer that remembers where it is for error messages.
struct LineReader {
  std::istream& in;
  int line_no = 0;

  bool next_line(std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }
};

double parse_double_token(const std::string& tok, int line) {
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ParseError("bad number '" + tok + "'", line);
  return v;
}

}  // namespace

ElevationMap load_elevation_map(std::istream& in) {
  LineReader reader{in};
  std::string line, key;

  if (!reader.next_line(line)) throw ParseError("missing 'resolution' header", reader.line_no);
  std::istringstream ls(line);
  double resolution = 0.0;
  if (!(ls >> key >> resolution) || key != "resolution" || resolution <= 0.0)
    throw ParseError("expected 'resolution <m>' with m > 0", reader.line_no);

  if (!reader.next_line(line)) throw ParseError("missing 'origin' header", reader.line_no);
  ls = std::istringstream(line);
  double ox = 0.0, oy = 0.0;
  if (!(ls >> key >> ox >> oy) || key != "origin")
    throw ParseError("expected 'origin <x> <y>'", reader.line_no);

  if (!reader.next_line(line)) throw ParseError("missing 'size' header", reader.line_no);
  ls = std::istringstream(line);
  long rows = 0, cols = 0;
  if (!(ls >> key >> rows >> cols) || key != "size" || rows <= 0 || cols <= 0)
    throw ParseError("expected 'size <rows> <cols>' with positive sizes", reader.line_no);

  std::vector<double> heights;
  heights.reserve(size_t(rows) * size_t(cols));
  std::string tok;
  while (heights.size() < size_t(rows) * size_t(cols) && reader.next_line(line)) {
    std::istringstream row(line);
    while (row >> tok) {
      if (heights.size() == size_t(rows) * size_t(cols))
        throw ParseError("more heights than rows*cols", reader.line_no);
      double h = parse_double_token(tok, reader.line_no);
      if (std::isinf(h)) throw ParseError("non-finite height '" + tok + "'", reader.line_no);
      heights.push_back(h);
    }
  }
  if (heights.size() != size_t(rows) * size_t(cols))
    throw ParseError("expected " + std::to_string(rows * cols) + " heights, got " +
                         std::to_string(heights.size()),
                     reader.line_no);

  // Trailing tokens after a complete grid are a size mismatch too.
  if (reader.next_line(line)) {
    std::istringstream rest(line);
    if (rest >> tok) throw ParseError("trailing data after grid", reader.line_no);
  }

  return ElevationMap(Eigen::Vector2d(ox, oy), resolution, int(rows), int(cols),
                      std::move(heights));
}

void save_elevation_map(const ElevationMap& map, std::ostream& out) {
  out << "resolution " << format_double(map.resolution()) << "\n";
  out << "origin " << format_double(map.origin().x()) << " "
      << format_double(map.origin().y()) << "\n";
  out << "size " << map.rows() << " " << map.cols() << "\n";
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      if (c > 0) out << " ";
      double h = map.at(r, c);
      out << (std::isfinite(h) ? format_double(h) : "nan");
    }
    out << "\n";
  }
}

std::vector<Vec3> load_xyz(std::istream& in) {
  LineReader reader{in};
  std::string line;
  std::vector<Vec3> points;
  while (reader.next_line(line)) {
    std::istringstream ls(line);
    std::string tx, ty, tz, extra;
    if (!(ls >> tx >> ty >> tz) || (ls >> extra))
      throw ParseError("expected 'x y z'", reader.line_no);
    Vec3 p(parse_double_token(tx, reader.line_no), parse_double_token(ty, reader.line_no),
           parse_double_token(tz, reader.line_no));
    if (!p.allFinite()) throw ParseError("non-finite point", reader.line_no);
    points.push_back(p);
  }
  if (points.empty()) throw ParseError("point cloud has no points", reader.line_no);
  return points;
}

void save_xyz(const std::vector<Vec3>& points, std::ostream& out) {
  for (const Vec3& p : points)
    out << format_double(p.x()) << " " << format_double(p.y()) << " "
        << format_double(p.z()) << "\n";
}

ElevationMap load_elevation_map_file(const std::string& path) {
  std::ifstream f = open_input(path);
  return load_elevation_map(f);
}

void save_elevation_map_file(const ElevationMap& map, const std::string& path) {
  std::ofstream f = open_output(path);
  save_elevation_map(map, f);
}

std::vector<Vec3> load_xyz_file(const std::string& path) {
  std::ifstream f = open_input(path);
  return load_xyz(f);
}

void save_xyz_file(const std::vector<Vec3>& points, const std::string& path) {
  std::ofstream f = open_output(path);
  save_xyz(points, f);
}

}  // namespace haploc
