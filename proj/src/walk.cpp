#include "haploc/sim/walk.hpp"

#include <cmath>
#include <stdexcept>

namespace haploc::sim {

NoiseSpec NoiseSpec::defaults() {
  NoiseSpec n;
  n.stddev = Eigen::Vector4d(0.003, 0.003, 0.002, 0.0015);
  n.bias_z = 0.002;
  n.bias_yaw = 0.0004;
  n.cov_inflation = 1.0;
  n.reported_floor = Eigen::Vector4d(0.015, 0.015, 0.004, 0.003);
  return n;
}

void NoiseSpec::validate() const {
  if ((stddev.array() < 0.0).any()) throw std::invalid_argument("noise stddev must be >= 0");
  if ((reported_floor.array() < 0.0).any())
    throw std::invalid_argument("reported_floor must be >= 0");
  if (!(cov_inflation > 0.0)) throw std::invalid_argument("cov_inflation must be > 0");
  if (!std::isfinite(bias_z) || !std::isfinite(bias_yaw))
    throw std::invalid_argument("bias must be finite");
}

Covariance6 NoiseSpec::reported_covariance() const {
  Eigen::Vector4d s = stddev.cwiseMax(reported_floor);
  Vec6 diag;
  diag << s(0) * s(0), s(1) * s(1), s(2) * s(2), 0.0, 0.0, s(3) * s(3);
  return Covariance6::from_diagonal(diag * cov_inflation);
}

namespace {

double ground_height(const ElevationMap& terrain, double x, double y) {
  std::optional<double> h = terrain.elevation_at(x, y);
  if (!h) throw std::invalid_argument("foot placement left the map");
  return *h;
}

// Least-squares plane z = ax + by + c through the four contacts.
Eigen::Vector3d fit_plane(const std::array<Vec3, kFootCount>& feet) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (const Vec3& f : feet) {
    Eigen::Vector3d row(f.x(), f.y(), 1.0);
    ata += row * row.transpose();
    atb += row * f.z();
  }
  return ata.ldlt().solve(atb);
}

// Base orientation whose z-axis is the plane normal and whose x-axis is the
// heading projected onto the plane.
Quat plane_orientation(const Eigen::Vector3d& plane, double heading) {
  Vec3 normal(-plane(0), -plane(1), 1.0);
  normal.normalize();
  Vec3 fwd(std::cos(heading), std::sin(heading), 0.0);
  Vec3 x_axis = (fwd - fwd.dot(normal) * normal).normalized();
  Vec3 y_axis = normal.cross(x_axis);
  Eigen::Matrix3d rot;
  rot.col(0) = x_axis;
  rot.col(1) = y_axis;
  rot.col(2) = normal;
  return Quat(rot).normalized();
}

struct GroundTruthStep {
  Pose pose;
  std::array<Vec3, kFootCount> foot_in_base;
};

GroundTruthStep place_on_terrain(const ElevationMap& terrain, const GaitSpec& gait,
                                 const Eigen::Vector2d& xy, double heading) {
  std::array<Vec3, kFootCount> feet_world;
  Eigen::Rotation2Dd yaw2(heading);
  for (int f = 0; f < kFootCount; ++f) {
    Eigen::Vector2d foot_xy = xy + yaw2 * gait.foot_offsets[f].head<2>();
    feet_world[f] =
        Vec3(foot_xy.x(), foot_xy.y(), ground_height(terrain, foot_xy.x(), foot_xy.y()));
  }

  Eigen::Vector3d plane = fit_plane(feet_world);
  double clearance = -gait.foot_offsets[0].z();

  GroundTruthStep out;
  out.pose.orientation = plane_orientation(plane, heading);
  out.pose.position =
      Vec3(xy.x(), xy.y(), plane(0) * xy.x() + plane(1) * xy.y() + plane(2) + clearance);
  Pose inv = inverse(out.pose);
  for (int f = 0; f < kFootCount; ++f)
    out.foot_in_base[f] = transform_point(inv, feet_world[f]);
  return out;
}

}  // namespace

EventLog simulate_walk(const ElevationMap& terrain, const GaitSpec& gait,
                       const NoiseSpec& noise,
                       const std::vector<Eigen::Vector2d>& waypoints, Rng& rng) {
  noise.validate();
  if (!(gait.step_length > 0.0)) throw std::invalid_argument("step length must be > 0");
  if (waypoints.size() < 2) throw std::invalid_argument("need at least two waypoints");
  for (const Eigen::Vector2d& w : waypoints)
    if (!terrain.in_bounds(w.x(), w.y()))
      throw std::invalid_argument("waypoint outside the map");

  const Covariance6 reported = noise.reported_covariance();
  std::normal_distribution<double> unit;
  auto draw = [&](double sigma) { return sigma > 0.0 ? sigma * unit(rng) : 0.0; };

  EventLog log;
  Eigen::Vector2d xy = waypoints[0];
  size_t target = 1;
  double heading =
      std::atan2(waypoints[1].y() - xy.y(), waypoints[1].x() - xy.x());

  GroundTruthStep gt = place_on_terrain(terrain, gait, xy, heading);
  Pose odom = gt.pose;
  Pose gt_prev = gt.pose;

  int k = 0;
  bool done = false;
  while (!done) {
    ContactEvent e;
    e.k = k;
    e.type = EventType::kWalk;
    e.gt_pose = gt.pose;
    e.state.odom_pose = odom;
    e.state.odom_cov = reported;
    e.state.foot_in_base = gt.foot_in_base;
    e.state.contact = {true, true, true, true};
    e.state.timestamp = double(k);
    log.push_back(e);

    // Advance along the polyline by one step.
    double remaining = gait.step_length;
    while (remaining > 0.0) {
      Eigen::Vector2d to_target = waypoints[target] - xy;
      double dist = to_target.norm();
      if (dist > 1e-12) heading = std::atan2(to_target.y(), to_target.x());
      if (dist > remaining) {
        xy += remaining / dist * to_target;
        remaining = 0.0;
      } else {
        xy = waypoints[target];
        remaining -= dist;
        if (++target == waypoints.size()) {
          done = true;
          break;
        }
      }
    }
    if (done) break;

    gt_prev = gt.pose;
    gt = place_on_terrain(terrain, gait, xy, heading);

    // Odometry: true increment plus heading-frame xy noise, world-frame z
    // noise/bias, yaw noise/bias. Roll and pitch are observable and copied
    // from ground truth.
    Pose raw = compose(odom, relative(gt_prev, gt.pose));
    double nx = draw(noise.stddev(0));
    double ny = draw(noise.stddev(1));
    double nz = draw(noise.stddev(2)) + noise.bias_z;
    double nyaw = draw(noise.stddev(3)) + noise.bias_yaw;

    double odom_yaw = raw.yaw();
    Eigen::Rotation2Dd head(odom_yaw);
    Eigen::Vector2d xy_noise = head * Eigen::Vector2d(nx, ny);
    Vec3 position = raw.position + Vec3(xy_noise.x(), xy_noise.y(), nz);
    odom = Pose::from_rpy(position, gt.pose.roll(), gt.pose.pitch(), odom_yaw + nyaw);

    ++k;
  }
  return log;
}

}  // namespace haploc::sim
