#pragma once

#include "haploc/event_log.hpp"
#include "haploc/point_cloud.hpp"
#include "haploc/sim/walk.hpp"

#include <variant>
#include <vector>

namespace haploc::sim {

/// Lateral base displacement done in steps of GaitSpec::step_length; the
/// direction is in the world frame (the base keeps its heading).
struct WalkAction {
  Eigen::Vector2d direction;
  double distance;
};

/// Single-foot probe along `direction` (base frame, normalized internally)
/// from a raised foot position.
struct ProbeAction {
  int foot = kRF;
  Vec3 direction;
};

struct ProbeScript {
  std::vector<std::variant<WalkAction, ProbeAction>> items;
};

struct ProbeParams {
  GaitSpec gait;
  /// Max ray length from the raised foot; probes past this miss.
  double workspace_reach = 0.6;
  /// Foot lift below the base while probing.
  double probe_lift = 0.2;
  /// Contact fires when the ray gets this close to a map point. Must stay
  /// above half the lattice diagonal of the cloud (a ray can otherwise
  /// thread between samples); 8 mm covers the default 1 cm spacing.
  double contact_epsilon = 0.008;
};

/// Replays the probe script against a point-cloud map of the environment
/// (walls and floor). Walk steps emit four-support events with the feet on
/// the floor; probes emit single-contact events whose ground-truth contact
/// point is an actual map point, or no-contact events if the ray exits the
/// workspace. Odometry starts displaced by `initial_offset`.
EventLog simulate_probing(const PointCloudMap& walls, const ProbeScript& script,
                          const NoiseSpec& noise, const Vec3& initial_offset,
                          const ProbeParams& params, Rng& rng);

/// Room fixture for the wall-probing scenario: a floor at z = 0 plus two
/// perpendicular walls (planes x = wall_x and y = wall_y) sampled on a
/// 1 cm lattice.
std::vector<Vec3> probe_room_cloud(double wall_x = 0.8, double wall_y = -0.9,
                                   double spacing = 0.01);

/// The scripted sequence of the wall experiment: alternating front and
/// right probes with the right-front foot while side-stepping right.
ProbeScript default_probe_script();

}  // namespace haploc::sim
