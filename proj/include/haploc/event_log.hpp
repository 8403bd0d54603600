#pragma once

#include "haploc/geometry.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace haploc {

/// Foot order used everywhere: left-front, right-front, left-hind,
/// right-hind.
enum FootId : int { kLF = 0, kRF = 1, kLH = 2, kRH = 3 };
constexpr int kFootCount = 4;

/// One snapshot of the odometric estimator plus kinematics: the inputs the
/// localizer gets from the robot at a filter trigger.
struct QuadrupedState {
  Pose odom_pose;
  Covariance6 odom_cov;
  std::array<Vec3, kFootCount> foot_in_base{};
  std::array<bool, kFootCount> contact{};
  double timestamp = 0.0;

  int contact_count() const;
};

enum class EventType { kWalk, kProbe };

/// One filter-trigger event: a four-support phase (walk) or a single-foot
/// probe. Ground truth rides along for evaluation only; the filter never
/// reads it.
struct ContactEvent {
  int k = 0;
  EventType type = EventType::kWalk;
  Pose gt_pose;
  QuadrupedState state;
};

using EventLog = std::vector<ContactEvent>;

/// CSV with one row per event:
///   k, type, gt pose (xyz + quat), odom pose (xyz + quat),
///   odom cov diag (6), foot_in_base (12), contacts (4)
/// Doubles are written in shortest round-trip form, so a saved log replays
/// bit-identically.
void save_event_log(const EventLog& log, std::ostream& out);
EventLog load_event_log(std::istream& in);

void save_event_log_file(const EventLog& log, const std::string& path);
EventLog load_event_log_file(const std::string& path);

}  // namespace haploc
