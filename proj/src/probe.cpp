#include "haploc/sim/probe.hpp"

#include <cmath>
#include <stdexcept>

namespace haploc::sim {

namespace {

std::array<Vec3, kFootCount> standing_feet(const GaitSpec& gait) {
  // Feet at nominal offsets on the flat floor (z = 0).
  return gait.foot_offsets;
}

ContactEvent make_event(int k, EventType type, const Pose& gt, const Pose& odom,
                        const Covariance6& cov,
                        const std::array<Vec3, kFootCount>& foot_in_base,
                        const std::array<bool, kFootCount>& contact) {
  ContactEvent e;
  e.k = k;
  e.type = type;
  e.gt_pose = gt;
  e.state.odom_pose = odom;
  e.state.odom_cov = cov;
  e.state.foot_in_base = foot_in_base;
  e.state.contact = contact;
  e.state.timestamp = double(k);
  return e;
}

}  // namespace

std::vector<Vec3> probe_room_cloud(double wall_x, double wall_y, double spacing) {
  std::vector<Vec3> cloud;
  auto lattice = [&](double lo, double hi) {
    std::vector<double> v;
    for (double t = lo; t <= hi + 1e-9; t += spacing) v.push_back(t);
    return v;
  };

  // Floor z = 0.
  for (double x : lattice(-1.0, wall_x))
    for (double y : lattice(wall_y, 1.0)) cloud.emplace_back(x, y, 0.0);
  // Front wall x = wall_x.
  for (double y : lattice(wall_y, 1.0))
    for (double z : lattice(0.0, 0.8)) cloud.emplace_back(wall_x, y, z);
  // Side wall y = wall_y.
  for (double x : lattice(-1.0, wall_x))
    for (double z : lattice(0.0, 0.8)) cloud.emplace_back(x, wall_y, z);
  return cloud;
}

ProbeScript default_probe_script() {
  ProbeScript script;
  for (int i = 0; i < 4; ++i) {
    script.items.push_back(ProbeAction{kRF, Vec3(1.0, 0.0, 0.0)});
    script.items.push_back(ProbeAction{kRF, Vec3(0.0, -1.0, 0.0)});
    script.items.push_back(WalkAction{Eigen::Vector2d(0.0, -1.0), 0.1});
  }
  script.items.push_back(ProbeAction{kRF, Vec3(1.0, 0.0, 0.0)});
  script.items.push_back(ProbeAction{kRF, Vec3(0.0, -1.0, 0.0)});
  return script;
}

EventLog simulate_probing(const PointCloudMap& walls, const ProbeScript& script,
                          const NoiseSpec& noise, const Vec3& initial_offset,
                          const ProbeParams& params, Rng& rng) {
  noise.validate();
  if (script.items.empty()) throw std::invalid_argument("probe script is empty");
  if (!(params.workspace_reach > 0.0))
    throw std::invalid_argument("workspace reach must be > 0");

  const Covariance6 reported = noise.reported_covariance();
  std::normal_distribution<double> unit;
  auto draw = [&](double sigma) { return sigma > 0.0 ? sigma * unit(rng) : 0.0; };

  const double clearance = -params.gait.foot_offsets[0].z();
  Pose gt;
  gt.position = Vec3(0.0, 0.0, clearance);
  Pose odom = gt;
  odom.position += initial_offset;

  EventLog log;
  int k = 0;

  // Initial four-support event on the floor.
  log.push_back(make_event(k++, EventType::kWalk, gt, odom, reported,
                           standing_feet(params.gait), {true, true, true, true}));

  for (const auto& item : script.items) {
    if (const WalkAction* walk = std::get_if<WalkAction>(&item)) {
      double dist = walk->distance;
      Eigen::Vector2d dir = walk->direction.normalized();
      while (dist > 1e-12) {
        double step = std::min(params.gait.step_length, dist);
        dist -= step;
        Pose gt_prev = gt;
        gt.position += Vec3(dir.x() * step, dir.y() * step, 0.0);

        Pose raw = compose(odom, relative(gt_prev, gt));
        double odom_yaw = raw.yaw();
        Eigen::Rotation2Dd head(odom_yaw);
        Eigen::Vector2d xy_noise =
            head * Eigen::Vector2d(draw(noise.stddev(0)), draw(noise.stddev(1)));
        Vec3 position = raw.position +
                        Vec3(xy_noise.x(), xy_noise.y(), draw(noise.stddev(2)) + noise.bias_z);
        odom = Pose::from_rpy(position, gt.roll(), gt.pitch(),
                              odom_yaw + draw(noise.stddev(3)) + noise.bias_yaw);

        log.push_back(make_event(k++, EventType::kWalk, gt, odom, reported,
                                 standing_feet(params.gait), {true, true, true, true}));
      }
    } else {
      const ProbeAction& probe = std::get<ProbeAction>(item);
      if (probe.foot < 0 || probe.foot >= kFootCount)
        throw std::invalid_argument("probe foot id out of range");
      Vec3 dir = probe.direction.normalized();

      // Raised foot start, then sphere-trace toward the map.
      Vec3 offset = params.gait.foot_offsets[probe.foot];
      Vec3 start = transform_point(gt, Vec3(offset.x(), offset.y(), -params.probe_lift));
      Vec3 world_dir = gt.orientation * dir;

      double traveled = 0.0;
      Vec3 p = start;
      bool hit = false;
      Vec3 contact_point = Vec3::Zero();
      while (traveled <= params.workspace_reach) {
        PointCloudMap::Nearest n = walls.nearest(p);
        if (n.distance < params.contact_epsilon) {
          hit = true;
          contact_point = n.point;
          break;
        }
        double advance = std::max(n.distance - params.contact_epsilon / 2.0, 1e-4);
        advance = std::min(advance, params.workspace_reach - traveled + 1e-4);
        p += advance * world_dir;
        traveled += advance;
      }

      std::array<Vec3, kFootCount> feet = standing_feet(params.gait);
      std::array<bool, kFootCount> contact{false, false, false, false};
      if (hit) {
        feet[probe.foot] = transform_point(inverse(gt), contact_point);
        contact[probe.foot] = true;
      }
      log.push_back(make_event(k++, EventType::kProbe, gt, odom, reported, feet, contact));
    }
  }
  return log;
}

}  // namespace haploc::sim
