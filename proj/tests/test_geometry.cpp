#include "haploc/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace haploc;

namespace {

// Independent oracle: 4x4 homogeneous matrix arithmetic.
Mat4 matrix_compose(const Pose& a, const Pose& b) { return a.matrix() * b.matrix(); }

Pose pose_from_matrix(const Mat4& m) {
  Pose p;
  p.position = m.topRightCorner<3, 1>();
  p.orientation = Quat(Eigen::Matrix3d(m.topLeftCorner<3, 3>())).normalized();
  return p;
}

Pose random_pose(Rng& rng) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  return Pose::from_rpy(Vec3(pos(rng), pos(rng), pos(rng)), ang(rng) / 4.0, ang(rng) / 4.0,
                        ang(rng));
}

}  // namespace

TEST_CASE("compose identity and translations") {
  Pose p = Pose::from_rpy(Vec3(1.0, -2.0, 0.5), 0.1, -0.2, 0.7);
  CHECK(approx_equal(compose(Pose::identity(), p), p));
  CHECK(approx_equal(compose(p, Pose::identity()), p));

  Pose t = compose(Pose::from_translation(1, 0, 0), Pose::from_translation(0, 2, 0));
  CHECK(approx_equal(t, Pose::from_translation(1, 2, 0)));
}

TEST_CASE("compose rotation against matrix oracle") {
  Pose yaw90 = Pose::from_yaw(M_PI / 2.0);
  Pose step = Pose::from_translation(1, 0, 0);
  Pose got = compose(yaw90, step);

  CHECK(got.position.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(got.position.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(got.yaw() == doctest::Approx(M_PI / 2.0));

  Pose oracle = pose_from_matrix(matrix_compose(yaw90, step));
  CHECK(approx_equal(got, oracle));
}

TEST_CASE("compose associativity over random triples") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    CHECK(approx_equal(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9, 1e-9));
  }
}

TEST_CASE("quaternion stays normalized through long chains") {
  Rng rng(7);
  Pose acc;
  for (int i = 0; i < 2000; ++i) acc = compose(acc, random_pose(rng));
  CHECK(std::abs(acc.orientation.norm() - 1.0) < 1e-9);
  CHECK(approx_equal(compose(inverse(acc), acc), Pose::identity(), 1e-7, 1e-9));
}

TEST_CASE("relative basics and oracle") {
  Pose p = Pose::from_rpy(Vec3(0.3, 1.0, -0.2), 0.0, 0.1, 1.2);
  CHECK(approx_equal(relative(p, p), Pose::identity()));
  CHECK(approx_equal(relative(Pose::identity(), p), p));

  Pose got = relative(Pose::from_translation(1, 0, 0), Pose::from_translation(3, 0, 0));
  CHECK(approx_equal(got, Pose::from_translation(2, 0, 0)));

  // Oracle: inv(a) * b with raw matrices.
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Pose a = random_pose(rng), b = random_pose(rng);
    Pose oracle = pose_from_matrix(Mat4(a.matrix().inverse() * b.matrix()));
    CHECK(approx_equal(relative(a, b), oracle, 1e-9, 1e-9));
  }
}

TEST_CASE("relative/compose round trip over random pairs") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    Pose a = random_pose(rng), b = random_pose(rng);
    CHECK(approx_equal(compose(a, relative(a, b)), b, 1e-9, 1e-9));
  }
}

TEST_CASE("transform_point") {
  CHECK((transform_point(Pose::identity(), Vec3(1, 2, 3)) - Vec3(1, 2, 3)).norm() == 0.0);

  Vec3 lifted = transform_point(Pose::from_translation(0, 0, 0.5), Vec3(0.3, 0.2, -0.5));
  CHECK((lifted - Vec3(0.3, 0.2, 0.0)).norm() < 1e-15);

  Pose p = Pose::from_rpy(Vec3(1, 0, 0), 0.0, 0.0, M_PI);
  Vec3 got = transform_point(p, Vec3(1, 0, 0));
  CHECK(got.norm() < 1e-12);

  // Matrix oracle on a random batch.
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Pose a = random_pose(rng);
    Vec3 v(0.4, -0.1, 0.7);
    Eigen::Vector4d hom = a.matrix() * Eigen::Vector4d(v.x(), v.y(), v.z(), 1.0);
    CHECK((transform_point(a, v) - hom.head<3>()).norm() < 1e-12);
  }
}

TEST_CASE("covariance validation") {
  Mat6 bad = Mat6::Identity();
  bad(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(Covariance6{bad}, std::invalid_argument);

  Mat6 negative = Mat6::Identity();
  negative(2, 2) = -1.0;
  CHECK_THROWS_AS(Covariance6{negative}, std::invalid_argument);

  CHECK_NOTHROW(Covariance6::from_diagonal((Vec6() << 1, 2, 3, 0, 0, 4).finished()));
}

TEST_CASE("sample_pose zero covariance returns the mean exactly") {
  Rng rng(1);
  Pose mean = Pose::from_rpy(Vec3(2, 3, 4), 0.05, -0.02, 0.9);
  for (const SampleSpaceMask& mask :
       {SampleSpaceMask::all(), SampleSpaceMask::z_only(), SampleSpaceMask{true, false, false, false}}) {
    Pose s = sample_pose(mean, Covariance6::zero(), mask, rng);
    CHECK(s.position == mean.position);
    CHECK(s.orientation.coeffs() == mean.orientation.coeffs());
  }
}

TEST_CASE("sample_pose mask restricts perturbed dimensions") {
  Rng rng(2);
  Pose mean = Pose::from_rpy(Vec3(1, 1, 1), 0.1, 0.2, 0.3);
  Covariance6 cov = Covariance6::from_diagonal(Vec6::Constant(0.01));
  for (int i = 0; i < 50; ++i) {
    Pose s = sample_pose(mean, cov, SampleSpaceMask::z_only(), rng);
    CHECK(s.position.x() == mean.position.x());
    CHECK(s.position.y() == mean.position.y());
    CHECK(s.position.z() != mean.position.z());
    CHECK(s.orientation.coeffs() == mean.orientation.coeffs());
  }
}

TEST_CASE("sample_pose rejects indefinite covariance") {
  Rng rng(3);
  Mat6 m = Mat6::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(0, 1) = m(1, 0) = 2.0;  // symmetric but indefinite
  Covariance6 cov;
  bool threw = false;
  try {
    cov = Covariance6(m);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK(threw);
}

TEST_CASE("sample_pose statistics over 1e5 draws") {
  Rng rng(20240429);
  Pose mean = Pose::from_rpy(Vec3(1.0, -0.5, 0.2), 0.0, 0.0, 0.4);
  Vec6 diag;
  diag << 0.01, 0.04, 0.0025, 0.0, 0.0, 0.01;
  Covariance6 cov = Covariance6::from_diagonal(diag);

  const int n = 100000;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  Eigen::Vector4d sum_sq = Eigen::Vector4d::Zero();
  for (int i = 0; i < n; ++i) {
    Pose s = sample_pose(mean, cov, SampleSpaceMask::all(), rng);
    Eigen::Vector4d d(s.position.x() - mean.position.x(), s.position.y() - mean.position.y(),
                      s.position.z() - mean.position.z(), wrap_angle(s.yaw() - mean.yaw()));
    sum += d;
    sum_sq += d.cwiseProduct(d);
  }

  Eigen::Vector4d expected_var(0.01, 0.04, 0.0025, 0.01);
  for (int d = 0; d < 4; ++d) {
    double var = sum_sq(d) / n - std::pow(sum(d) / n, 2);
    CHECK(var == doctest::Approx(expected_var(d)).epsilon(0.05));
    // Sample mean within 3 standard errors of the mean pose.
    double se = std::sqrt(expected_var(d) / n);
    CHECK(std::abs(sum(d) / n) < 3.0 * se);
  }
}

TEST_CASE("sample_pose preserves roll and pitch under yaw sampling") {
  Rng rng(77);
  Covariance6 cov = Covariance6::from_diagonal(
      (Vec6() << 0.04, 0.04, 0.04, 100.0, 100.0, 0.25).finished());  // huge roll/pitch vars
  SUBCASE("level pose keeps exact zeros") {
    Pose mean = Pose::from_yaw(1.1);
    for (int i = 0; i < 100; ++i) {
      Pose s = sample_pose(mean, cov, SampleSpaceMask::all(), rng);
      CHECK(s.roll() == 0.0);
      CHECK(s.pitch() == 0.0);
    }
  }
  SUBCASE("tilted pose keeps roll/pitch to rounding") {
    Pose mean = Pose::from_rpy(Vec3::Zero(), 0.12, -0.21, 0.5);
    for (int i = 0; i < 100; ++i) {
      Pose s = sample_pose(mean, cov, SampleSpaceMask::all(), rng);
      CHECK(s.roll() == doctest::Approx(mean.roll()).epsilon(1e-13));
      CHECK(s.pitch() == doctest::Approx(mean.pitch()).epsilon(1e-13));
    }
  }
}

TEST_CASE("yaw wraps to (-pi, pi]") {
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(0.1) == doctest::Approx(0.1));
  CHECK(Pose::from_yaw(3.0).yaw() == doctest::Approx(3.0));
  CHECK(Pose::from_yaw(-3.0).yaw() == doctest::Approx(-3.0));
}
