#pragma once

#include "haploc/elevation_map.hpp"
#include "haploc/point_cloud.hpp"

#include <optional>

namespace haploc {

/// Contact measurement model: zero-mean Gaussian over the contact residual
/// with a flat floor `rho` so outlier contacts cannot zero a particle out.
struct LikelihoodConfig {
  double sigma_z = 0.01;  // meters
  double rho = default_rho(0.01);

  /// 1e-3 of the Gaussian peak: residuals beyond ~3.7 sigma contribute a
  /// flat floor instead of vanishing.
  static double default_rho(double sigma_z);
  static LikelihoodConfig with_sigma(double sigma_z);

  /// Throws std::invalid_argument unless sigma_z > 0 and
  /// 0 < rho < gaussian peak.
  void validate() const;
};

double gaussian_pdf(double x, double sigma);
double log_gaussian_pdf(double x, double sigma);

/// Signed vertical residual between the foot and the map cell under it.
/// Empty when the foot is off-map or over a no-data cell; such a contact is
/// uninformative, not an outlier.
std::optional<double> residual_2p5d(const ElevationMap& map, const Vec3& foot_world);

/// Euclidean distance from the foot to the nearest map point; always >= 0.
double residual_3d(const PointCloudMap& map, const Vec3& foot_world);

/// max(rho, N(residual; 0, sigma_z)). Unnormalized; the filter renormalizes
/// weights.
double contact_likelihood(double residual, const LikelihoodConfig& cfg);

/// Same clamp in log space; what the filter accumulates.
double log_contact_likelihood(double residual, const LikelihoodConfig& cfg);

}  // namespace haploc
