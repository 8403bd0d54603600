#include "haploc/metrics.hpp"

#include "haploc/map_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace haploc {

TrajectoryErrorReport ate(const std::vector<Pose>& estimate, const std::vector<Pose>& gt,
                          const std::vector<std::string>& labels) {
  if (estimate.size() != gt.size())
    throw std::invalid_argument("trajectory length mismatch: " +
                                std::to_string(estimate.size()) + " vs " +
                                std::to_string(gt.size()));
  if (estimate.empty()) throw std::invalid_argument("empty trajectory");
  if (!labels.empty() && labels.size() != estimate.size())
    throw std::invalid_argument("label count does not match trajectory length");

  TrajectoryErrorReport report;
  report.per_axis.reserve(estimate.size());

  double sum = 0.0, sum_sq = 0.0, yaw_abs = 0.0;
  std::map<std::string, std::pair<double, double>> seg_acc;  // sum, sum_sq
  std::map<std::string, int> seg_count;

  for (size_t i = 0; i < estimate.size(); ++i) {
    Vec3 diff = estimate[i].position - gt[i].position;
    double err = diff.norm();
    sum += err;
    sum_sq += err * err;

    AxisError ax;
    ax.t = double(i);
    ax.ex = diff.x();
    ax.ey = diff.y();
    ax.ez = diff.z();
    ax.eyaw = wrap_angle(estimate[i].yaw() - gt[i].yaw());
    yaw_abs += std::abs(ax.eyaw);
    report.per_axis.push_back(ax);

    if (!labels.empty()) {
      seg_acc[labels[i]].first += err;
      seg_acc[labels[i]].second += err * err;
      seg_count[labels[i]] += 1;
    }
  }

  const double n = double(estimate.size());
  report.ate_mean = sum / n;
  report.ate_rmse = std::sqrt(sum_sq / n);
  report.yaw_mean_abs = yaw_abs / n;
  for (const auto& [label, acc] : seg_acc) {
    SegmentStats s;
    s.count = seg_count[label];
    s.mean = acc.first / s.count;
    s.rmse = std::sqrt(acc.second / s.count);
    report.segments[label] = s;
  }
  return report;
}

std::string report_to_json(const TrajectoryErrorReport& report) {
  nlohmann::json j;
  j["ate_mean"] = report.ate_mean;
  j["ate_rmse"] = report.ate_rmse;
  j["yaw_mean_abs"] = report.yaw_mean_abs;
  j["steps"] = report.per_axis.size();
  for (const auto& [label, s] : report.segments) {
    j["segments"][label] = {{"mean", s.mean}, {"rmse", s.rmse}, {"count", s.count}};
  }
  return j.dump(2);
}

void save_error_trace_csv(const TrajectoryErrorReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f << "t,ex,ey,ez,eyaw\n";
  for (const AxisError& ax : report.per_axis)
    f << format_double(ax.t) << "," << format_double(ax.ex) << "," << format_double(ax.ey)
      << "," << format_double(ax.ez) << "," << format_double(ax.eyaw) << "\n";
}

}  // namespace haploc
