#include "haploc/likelihood.hpp"

#include <cmath>
#include <stdexcept>

namespace haploc {

namespace {
constexpr double kSqrt2Pi = 2.506628274631000502;
}

double gaussian_pdf(double x, double sigma) {
  double u = x / sigma;
  return std::exp(-0.5 * u * u) / (sigma * kSqrt2Pi);
}

double log_gaussian_pdf(double x, double sigma) {
  double u = x / sigma;
  return -0.5 * u * u - std::log(sigma * kSqrt2Pi);
}

double LikelihoodConfig::default_rho(double sigma_z) {
  return 1e-3 / (sigma_z * kSqrt2Pi);
}

LikelihoodConfig LikelihoodConfig::with_sigma(double sigma_z) {
  LikelihoodConfig cfg;
  cfg.sigma_z = sigma_z;
  cfg.rho = default_rho(sigma_z);
  return cfg;
}

void LikelihoodConfig::validate() const {
  if (!(sigma_z > 0.0)) throw std::invalid_argument("sigma_z must be > 0");
  double peak = 1.0 / (sigma_z * kSqrt2Pi);
  if (!(rho > 0.0) || !(rho < peak))
    throw std::invalid_argument("rho must lie in (0, gaussian peak)");
}

std::optional<double> residual_2p5d(const ElevationMap& map, const Vec3& foot_world) {
  std::optional<double> h = map.elevation_at(foot_world.x(), foot_world.y());
  if (!h) return std::nullopt;
  return foot_world.z() - *h;
}

double residual_3d(const PointCloudMap& map, const Vec3& foot_world) {
  return map.nearest(foot_world).distance;
}

double contact_likelihood(double residual, const LikelihoodConfig& cfg) {
  return std::max(cfg.rho, gaussian_pdf(residual, cfg.sigma_z));
}

double log_contact_likelihood(double residual, const LikelihoodConfig& cfg) {
  return std::max(std::log(cfg.rho), log_gaussian_pdf(residual, cfg.sigma_z));
}

}  // namespace haploc
