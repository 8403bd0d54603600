#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <random>

namespace haploc {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Deterministic random stream. All stochastic operations take one of these
/// explicitly; there is no global RNG.
using Rng = std::mt19937_64;

/// Derives an independent substream from a master seed. Used to keep the
/// simulator and the filter on separate streams so that a recorded event log
/// replays identically.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Rigid transform in SE(3): world-frame position plus unit quaternion.
struct Pose {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};

  static Pose identity() { return {}; }
  static Pose from_translation(double x, double y, double z);
  static Pose from_rpy(const Vec3& position, double roll, double pitch, double yaw);
  static Pose from_yaw(double yaw);

  Mat4 matrix() const;

  double roll() const;
  double pitch() const;
  /// Z-Y-X Euler yaw, wrapped to (-pi, pi].
  double yaw() const;
};

/// a then b, homogeneous-matrix product semantics.
Pose compose(const Pose& a, const Pose& b);

Pose inverse(const Pose& p);

/// The pose of b expressed in a's frame: compose(a, relative(a, b)) == b.
Pose relative(const Pose& a, const Pose& b);

/// Rigid transform of a point into the world frame.
Vec3 transform_point(const Pose& pose, const Vec3& point);

bool approx_equal(const Pose& a, const Pose& b, double tol_trans = 1e-9,
                  double tol_rot = 1e-9);

/// 6x6 pose covariance, rows/cols ordered (x, y, z, roll, pitch, yaw).
/// Rotation uncertainty lives in the tangent space.
class Covariance6 {
 public:
  Covariance6() : m_(Mat6::Zero()) {}
  explicit Covariance6(const Mat6& m);

  static Covariance6 from_diagonal(const Vec6& diag);
  static Covariance6 zero() { return Covariance6(); }

  const Mat6& matrix() const { return m_; }
  Vec6 diagonal() const { return m_.diagonal(); }

  /// Throws std::invalid_argument if asymmetric beyond 1e-12 or any
  /// eigenvalue is below -1e-12.
  void validate() const;

 private:
  Mat6 m_;
};

/// Which tangent dimensions the proposal samples. Roll and pitch are
/// observable through gravity and are never sampled.
struct SampleSpaceMask {
  bool x = true;
  bool y = true;
  bool z = true;
  bool yaw = true;

  static SampleSpaceMask all() { return {}; }
  static SampleSpaceMask z_only() { return {false, false, true, false}; }
  int active_count() const { return int(x) + int(y) + int(z) + int(yaw); }
};

/// Draws one pose from a Gaussian centered at `mean` with covariance `cov`,
/// restricted to the masked dimensions. Translation offsets are applied in
/// the world frame; the yaw offset is applied as a world-z rotation, which
/// leaves the mean's roll and pitch untouched. Dimensions outside the mask
/// are copied from the mean unchanged.
///
/// Throws std::invalid_argument if `cov` fails validation.
Pose sample_pose(const Pose& mean, const Covariance6& cov,
                 const SampleSpaceMask& mask, Rng& rng);

}  // namespace haploc
