#include "haploc/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace haploc;

namespace {

std::vector<Pose> line_trajectory(int n, double dx) {
  std::vector<Pose> out;
  for (int i = 0; i < n; ++i) out.push_back(Pose::from_translation(i * dx, 0, 0));
  return out;
}

}  // namespace

TEST_CASE("identical trajectories give zero error") {
  std::vector<Pose> gt = line_trajectory(50, 0.1);
  TrajectoryErrorReport r = ate(gt, gt);
  CHECK(r.ate_mean == 0.0);
  CHECK(r.ate_rmse == 0.0);
  CHECK(r.yaw_mean_abs == 0.0);
}

TEST_CASE("constant offset gives mean == rmse == offset") {
  std::vector<Pose> gt = line_trajectory(50, 0.1);
  std::vector<Pose> est = gt;
  for (Pose& p : est) p.position.x() += 0.1;
  TrajectoryErrorReport r = ate(est, gt);
  CHECK(r.ate_mean == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.ate_rmse == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("linear z drift: closed-form mean and rmse") {
  const int n = 10001;
  std::vector<Pose> gt = line_trajectory(n, 0.01);
  std::vector<Pose> est = gt;
  for (int i = 0; i < n; ++i) est[i].position.z() += 0.5 * double(i) / double(n - 1);

  TrajectoryErrorReport r = ate(est, gt);
  // Continuum limits: mean = 0.25, rmse = 0.5/sqrt(3).
  CHECK(r.ate_mean == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(r.ate_rmse == doctest::Approx(0.5 / std::sqrt(3.0)).epsilon(1e-3));

  // Exact discrete sums as the oracle.
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double e = 0.5 * double(i) / double(n - 1);
    sum += e;
    sum_sq += e * e;
  }
  CHECK(r.ate_mean == doctest::Approx(sum / n).epsilon(1e-12));
  CHECK(r.ate_rmse == doctest::Approx(std::sqrt(sum_sq / n)).epsilon(1e-12));
}

TEST_CASE("ate is invariant under a shared rigid transform") {
  Rng rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Pose> gt, est;
  for (int i = 0; i < 100; ++i) {
    Pose g = Pose::from_rpy(Vec3(u(rng) * 5, u(rng) * 5, u(rng)), 0, 0, u(rng));
    Pose e = g;
    e.position += Vec3(u(rng), u(rng), u(rng)) * 0.1;
    gt.push_back(g);
    est.push_back(e);
  }
  TrajectoryErrorReport before = ate(est, gt);

  Pose rigid = Pose::from_rpy(Vec3(3, -2, 1), 0.0, 0.0, 1.1);
  std::vector<Pose> gt2, est2;
  for (int i = 0; i < 100; ++i) {
    gt2.push_back(compose(rigid, gt[i]));
    est2.push_back(compose(rigid, est[i]));
  }
  TrajectoryErrorReport after = ate(est2, gt2);
  CHECK(after.ate_mean == doctest::Approx(before.ate_mean).epsilon(1e-9));
  CHECK(after.ate_rmse == doctest::Approx(before.ate_rmse).epsilon(1e-9));
}

TEST_CASE("rmse dominates the mean absolute error") {
  Rng rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Pose> gt, est;
  for (int i = 0; i < 200; ++i) {
    Pose g = Pose::from_translation(i * 0.05, 0, 0);
    Pose e = g;
    e.position += Vec3(u(rng), u(rng), u(rng)) * 0.3;
    gt.push_back(g);
    est.push_back(e);
  }
  TrajectoryErrorReport r = ate(est, gt);
  CHECK(r.ate_rmse >= r.ate_mean);
}

TEST_CASE("yaw errors wrap") {
  std::vector<Pose> gt = {Pose::from_yaw(M_PI - 0.01)};
  std::vector<Pose> est = {Pose::from_yaw(-M_PI + 0.01)};
  TrajectoryErrorReport r = ate(est, gt);
  CHECK(r.per_axis[0].eyaw == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("length mismatch and empty input are rejected") {
  std::vector<Pose> a = line_trajectory(5, 0.1);
  std::vector<Pose> b = line_trajectory(6, 0.1);
  CHECK_THROWS_AS(ate(a, b), std::invalid_argument);
  CHECK_THROWS_AS(ate({}, {}), std::invalid_argument);
  std::vector<std::string> labels(3, "course");
  CHECK_THROWS_AS(ate(a, a, labels), std::invalid_argument);
}

TEST_CASE("segment stats split by label") {
  std::vector<Pose> gt = line_trajectory(4, 1.0);
  std::vector<Pose> est = gt;
  est[0].position.y() += 0.2;
  est[1].position.y() += 0.2;
  est[2].position.y() += 0.4;
  est[3].position.y() += 0.4;
  TrajectoryErrorReport r = ate(est, gt, {"course", "course", "flat", "flat"});
  CHECK(r.segments.at("course").mean == doctest::Approx(0.2));
  CHECK(r.segments.at("flat").mean == doctest::Approx(0.4));
  CHECK(r.segments.at("course").count == 2);

  std::string json = report_to_json(r);
  CHECK(json.find("\"course\"") != std::string::npos);
  CHECK(json.find("ate_mean") != std::string::npos);
}
