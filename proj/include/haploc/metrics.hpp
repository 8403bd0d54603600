#pragma once

#include "haploc/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace haploc {

struct AxisError {
  double t = 0.0;
  double ex = 0.0;
  double ey = 0.0;
  double ez = 0.0;
  double eyaw = 0.0;  // radians, wrapped to (-pi, pi]
};

struct SegmentStats {
  double mean = 0.0;
  double rmse = 0.0;
  int count = 0;
};

/// Absolute translation error of a trajectory against ground truth. No
/// alignment is applied: the initial pose is known, so errors are taken in
/// the shared world frame.
struct TrajectoryErrorReport {
  double ate_mean = 0.0;
  double ate_rmse = 0.0;
  double yaw_mean_abs = 0.0;
  std::vector<AxisError> per_axis;
  std::map<std::string, SegmentStats> segments;
};

/// Per-step Euclidean translation error statistics. `labels`, when
/// non-empty, assigns each step to a named segment (e.g. on-course vs flat)
/// and must match the trajectory length. Throws std::invalid_argument on
/// length mismatches.
TrajectoryErrorReport ate(const std::vector<Pose>& estimate, const std::vector<Pose>& gt,
                          const std::vector<std::string>& labels = {});

std::string report_to_json(const TrajectoryErrorReport& report);
void save_error_trace_csv(const TrajectoryErrorReport& report, const std::string& path);

}  // namespace haploc
