#include "haploc/event_log.hpp"

#include "haploc/map_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace haploc {

int QuadrupedState::contact_count() const {
  int n = 0;
  for (bool c : contact) n += c ? 1 : 0;
  return n;
}

namespace {

const char* kHeader =
    "k,type,gt_x,gt_y,gt_z,gt_qx,gt_qy,gt_qz,gt_qw,"
    "odom_x,odom_y,odom_z,odom_qx,odom_qy,odom_qz,odom_qw,"
    "cov_x,cov_y,cov_z,cov_roll,cov_pitch,cov_yaw,"
    "lf_x,lf_y,lf_z,rf_x,rf_y,rf_z,lh_x,lh_y,lh_z,rh_x,rh_y,rh_z,"
    "c_lf,c_rf,c_lh,c_rh";
constexpr int kColumns = 38;

void append_pose(std::ostringstream& row, const Pose& p) {
  row << "," << format_double(p.position.x()) << "," << format_double(p.position.y())
      << "," << format_double(p.position.z()) << "," << format_double(p.orientation.x())
      << "," << format_double(p.orientation.y()) << "," << format_double(p.orientation.z())
      << "," << format_double(p.orientation.w());
}

double parse_field(const std::string& tok, int line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ParseError("bad number '" + tok + "'", line);
  return v;
}

Pose parse_pose(const std::vector<std::string>& f, size_t at, int line) {
  Pose p;
  p.position = Vec3(parse_field(f[at], line), parse_field(f[at + 1], line),
                    parse_field(f[at + 2], line));
  p.orientation = Quat(parse_field(f[at + 6], line), parse_field(f[at + 3], line),
                       parse_field(f[at + 4], line), parse_field(f[at + 5], line));
  return p;
}

}  // namespace

void save_event_log(const EventLog& log, std::ostream& out) {
  out << kHeader << "\n";
  for (const ContactEvent& e : log) {
    std::ostringstream row;
    row << e.k << "," << (e.type == EventType::kWalk ? "walk" : "probe");
    append_pose(row, e.gt_pose);
    append_pose(row, e.state.odom_pose);
    Vec6 d = e.state.odom_cov.diagonal();
    for (int i = 0; i < 6; ++i) row << "," << format_double(d(i));
    for (const Vec3& foot : e.state.foot_in_base)
      row << "," << format_double(foot.x()) << "," << format_double(foot.y()) << ","
          << format_double(foot.z());
    for (bool c : e.state.contact) row << "," << (c ? 1 : 0);
    out << row.str() << "\n";
  }
}

EventLog load_event_log(std::istream& in) {
  EventLog log;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("k,type", 0) == 0) continue;  // header row
    }

    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (f.size() != kColumns)
      throw ParseError("expected " + std::to_string(kColumns) + " fields, got " +
                           std::to_string(f.size()),
                       line_no);

    ContactEvent e;
    e.k = int(parse_field(f[0], line_no));
    if (f[1] == "walk")
      e.type = EventType::kWalk;
    else if (f[1] == "probe")
      e.type = EventType::kProbe;
    else
      throw ParseError("unknown event type '" + f[1] + "'", line_no);

    e.gt_pose = parse_pose(f, 2, line_no);
    e.state.odom_pose = parse_pose(f, 9, line_no);
    Vec6 d;
    for (int i = 0; i < 6; ++i) d(i) = parse_field(f[16 + i], line_no);
    e.state.odom_cov = Covariance6::from_diagonal(d);
    for (int foot = 0; foot < kFootCount; ++foot)
      e.state.foot_in_base[foot] =
          Vec3(parse_field(f[22 + 3 * foot], line_no), parse_field(f[23 + 3 * foot], line_no),
               parse_field(f[24 + 3 * foot], line_no));
    for (int foot = 0; foot < kFootCount; ++foot)
      e.state.contact[foot] = parse_field(f[34 + foot], line_no) != 0.0;
    e.state.timestamp = double(e.k);
    log.push_back(e);
  }
  return log;
}

void save_event_log_file(const EventLog& log, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  save_event_log(log, f);
}

EventLog load_event_log_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  return load_event_log(f);
}

}  // namespace haploc
