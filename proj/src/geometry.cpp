#include "haploc/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace haploc {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  // splitmix64 over master + stream index; decorrelates nearby seeds.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

Pose Pose::from_translation(double x, double y, double z) {
  Pose p;
  p.position = Vec3(x, y, z);
  return p;
}

Pose Pose::from_rpy(const Vec3& position, double roll, double pitch, double yaw) {
  Pose p;
  p.position = position;
  p.orientation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                  Eigen::AngleAxisd(roll, Vec3::UnitX());
  p.orientation.normalize();
  return p;
}

Pose Pose::from_yaw(double yaw) { return from_rpy(Vec3::Zero(), 0.0, 0.0, yaw); }

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = orientation.toRotationMatrix();
  m.topRightCorner<3, 1>() = position;
  return m;
}

double Pose::roll() const {
  const Quat& q = orientation;
  return std::atan2(2.0 * (q.w() * q.x() + q.y() * q.z()),
                    1.0 - 2.0 * (q.x() * q.x() + q.y() * q.y()));
}

double Pose::pitch() const {
  const Quat& q = orientation;
  double s = 2.0 * (q.w() * q.y() - q.z() * q.x());
  s = std::clamp(s, -1.0, 1.0);
  return std::asin(s);
}

double Pose::yaw() const {
  const Quat& q = orientation;
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                    1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.position = a.position + a.orientation * b.position;
  out.orientation = (a.orientation * b.orientation).normalized();
  return out;
}

Pose inverse(const Pose& p) {
  Pose out;
  out.orientation = p.orientation.conjugate();
  out.position = -(out.orientation * p.position);
  return out;
}

Pose relative(const Pose& a, const Pose& b) { return compose(inverse(a), b); }

Vec3 transform_point(const Pose& pose, const Vec3& point) {
  return pose.position + pose.orientation * point;
}

bool approx_equal(const Pose& a, const Pose& b, double tol_trans, double tol_rot) {
  if ((a.position - b.position).norm() > tol_trans) return false;
  // Coefficient distance up to sign; approximately angle/2 for small
  // angles and numerically stable where acos of the dot product is not.
  Eigen::Vector4d ca = a.orientation.coeffs();
  Eigen::Vector4d cb = b.orientation.coeffs();
  double qd = std::min((ca - cb).norm(), (ca + cb).norm());
  return 2.0 * qd <= tol_rot;
}

Covariance6::Covariance6(const Mat6& m) : m_(m) { validate(); }

Covariance6 Covariance6::from_diagonal(const Vec6& diag) {
  Covariance6 c;
  c.m_ = diag.asDiagonal();
  c.validate();
  return c;
}

void Covariance6::validate() const {
  if (!m_.allFinite()) throw std::invalid_argument("covariance has non-finite entries");
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat6> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw std::invalid_argument("covariance is not positive semi-definite");
}

Pose sample_pose(const Pose& mean, const Covariance6& cov,
                 const SampleSpaceMask& mask, Rng& rng) {
  cov.validate();

  // Indices into the (x, y, z, roll, pitch, yaw) ordering.
  int dims[4];
  int n = 0;
  if (mask.x) dims[n++] = 0;
  if (mask.y) dims[n++] = 1;
  if (mask.z) dims[n++] = 2;
  if (mask.yaw) dims[n++] = 5;
  if (n == 0) return mean;

  Eigen::MatrixXd sub(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sub(i, j) = cov.matrix()(dims[i], dims[j]);

  if (sub.cwiseAbs().maxCoeff() == 0.0) return mean;

  // PSD square root via eigendecomposition; tolerates zero eigenvalues.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();

  std::normal_distribution<double> unit;
  Eigen::VectorXd draw(n);
  for (int i = 0; i < n; ++i) draw(i) = unit(rng);
  Eigen::VectorXd offset = root * draw;

  Pose out = mean;
  double yaw_offset = 0.0;
  for (int i = 0; i < n; ++i) {
    if (dims[i] == 5)
      yaw_offset = offset(i);
    else
      out.position(dims[i]) += offset(i);
  }
  if (mask.yaw && yaw_offset != 0.0) {
    // World-z rotation: shifts Euler Z-Y-X yaw, preserves roll and pitch.
    Quat dq(Eigen::AngleAxisd(yaw_offset, Vec3::UnitZ()));
    out.orientation = (dq * out.orientation).normalized();
  }
  return out;
}

}  // namespace haploc
