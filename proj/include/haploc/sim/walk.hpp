#pragma once

#include "haploc/elevation_map.hpp"
#include "haploc/event_log.hpp"

#include <array>

namespace haploc::sim {

struct GaitSpec {
  /// Base travel per four-support event.
  double step_length = 0.0653;
  double stance_width = 0.372;
  /// Nominal foot positions in the base frame, order LF RF LH RH. The
  /// shared -z is the standing height of the base above the ground plane.
  std::array<Vec3, kFootCount> foot_offsets = {
      Vec3(0.303, 0.186, -0.45), Vec3(0.303, -0.186, -0.45), Vec3(-0.303, 0.186, -0.45),
      Vec3(-0.303, -0.186, -0.45)};
  int steps_per_support_phase = 1;
};

struct NoiseSpec {
  /// Per-step odometry noise std dev on (x, y, z, yaw); x/y in the heading
  /// frame, z in the world frame, yaw about world z.
  Eigen::Vector4d stddev = Eigen::Vector4d::Zero();
  /// Deterministic per-step drift.
  double bias_z = 0.0;
  double bias_yaw = 0.0;
  /// Reported covariance = (max(stddev, reported_floor))^2 * cov_inflation.
  /// The floor models how a real estimator reports per-phase uncertainty:
  /// never zero, and larger than the crisp simulated white noise because it
  /// also covers unmodeled effects (impacts, kinematic error).
  double cov_inflation = 1.0;
  Eigen::Vector4d reported_floor = Eigen::Vector4d(0.015, 0.015, 0.004, 0.003);

  static NoiseSpec defaults();
  Covariance6 reported_covariance() const;
  void validate() const;
};

/// Generates one ground-truth/odometry event per four-support phase along
/// the waypoint polyline. Ground-truth feet sit exactly on the terrain
/// surface; the base follows the plane fitted through the four contacts.
/// Odometry integrates the per-step noise and bias on top of the true
/// motion. Throws std::invalid_argument if a waypoint (or a foot placement)
/// leaves the map.
EventLog simulate_walk(const ElevationMap& terrain, const GaitSpec& gait,
                       const NoiseSpec& noise,
                       const std::vector<Eigen::Vector2d>& waypoints, Rng& rng);

}  // namespace haploc::sim
