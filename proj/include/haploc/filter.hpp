#pragma once

#include "haploc/event_log.hpp"
#include "haploc/geometry.hpp"
#include "haploc/likelihood.hpp"

#include <variant>
#include <vector>

namespace haploc {

/// Either prior map representation; the filter picks the matching residual.
using PriorMap = std::variant<const ElevationMap*, const PointCloudMap*>;

/// One pose hypothesis. `parent` indexes the previous stored generation and
/// is what trajectory reconstruction walks; -1 for the initial generation.
struct Particle {
  Pose pose;
  double weight = 0.0;
  std::int32_t parent = -1;
};

enum class EstimateMode { kFullPose, kZOnly };

enum class ResampleTrigger { kWeightVariance, kEss };

struct FilterConfig {
  int particle_count = 1000;
  Covariance6 init_cov =
      Covariance6::from_diagonal((Vec6() << 0.04, 0.04, 0.04, 0.0, 0.0, 0.01).finished());
  LikelihoodConfig likelihood;
  // Tuned once on the simulated terrain course (N = 1000) so that flat
  // ground, where weights carry no xy information, never triggers a
  // resample; informative contacts do.
  double resample_weight_variance_threshold = 1e-5;
  double xy_variance_gate_factor = 4.0;
  SampleSpaceMask sample_mask;
  // Alternative trigger, off by default: resample when the effective sample
  // size drops below ess_fraction * N.
  ResampleTrigger resample_trigger = ResampleTrigger::kWeightVariance;
  double ess_fraction = 0.5;

  void validate() const;
};

struct StepResult {
  Pose estimate;
  EstimateMode mode = EstimateMode::kFullPose;
  double weight_variance = 0.0;
  double effective_sample_size = 0.0;
  bool resampled = false;
  bool all_outlier = false;
};

struct TrajectoryEstimate {
  std::vector<Pose> poses;  // initial estimate + one per processed event
  std::vector<EstimateMode> modes;
};

/// Normalizes log weights with a max shift. If every weight is zero or
/// non-finite (an all-outlier event) the result is uniform and the flag is
/// set.
struct NormalizedWeights {
  std::vector<double> weights;
  bool all_outlier = false;
};
NormalizedWeights normalize_log_weights(const std::vector<double>& log_weights);

double weight_variance(const std::vector<double>& weights);
double effective_sample_size(const std::vector<double>& weights);

/// Systematic (low-variance) resampling: one uniform draw positions N
/// equally spaced pointers over the cumulative weights. Returns the chosen
/// source index per slot.
std::vector<std::int32_t> systematic_resample_indices(const std::vector<double>& weights,
                                                      Rng& rng);

/// Resamples in place when the weight variance exceeds `threshold`:
/// particles become copies of their systematic draws with uniform weights,
/// `parent` recording the source index. Returns whether it fired.
bool maybe_resample(std::vector<Particle>& particles, double threshold, Rng& rng);

/// Weighted particle statistics and the multimodality gate. Position is the
/// weighted mean, yaw the weighted circular mean, roll/pitch the weighted
/// arithmetic mean (identical across particles by construction). Full-pose
/// mode requires the weighted x and y variances to stay within
/// gate_factor times the per-step odometry sampling variances; otherwise
/// the returned pose keeps `fallback` (the odometry-propagated estimate) in
/// x, y and yaw and takes only the weighted-mean z.
struct GateResult {
  Pose pose;
  EstimateMode mode;
  Vec3 mean_position = Vec3::Zero();
  double var_x = 0.0;
  double var_y = 0.0;
};
GateResult estimate_gate(const std::vector<Particle>& particles, double sampling_var_x,
                         double sampling_var_y, double gate_factor, const Pose& fallback);

/// Sequential Monte Carlo localizer. Single writer; one update at a time.
class Filter {
 public:
  /// Draws N particles around `initial_pose` with the configured initial
  /// covariance and uniform weights.
  Filter(const FilterConfig& cfg, const Pose& initial_pose, Rng& rng);

  const FilterConfig& config() const { return cfg_; }
  const std::vector<Particle>& particles() const { return particles_; }
  const Pose& current_estimate() const { return estimate_; }
  int steps_processed() const { return int(modes_.size()); }

  /// One filter update between two consecutive trigger events: propagate
  /// every particle by the odometry increment, reweight by the contact
  /// likelihoods of the flagged feet, renormalize, gate the estimate, and
  /// resample if triggered.
  StepResult update(const QuadrupedState& prev, const QuadrupedState& curr,
                    const PriorMap& map, Rng& rng);

  /// Gated per-step estimates: initial + one per update (what a controller
  /// would consume).
  TrajectoryEstimate estimate_trajectory() const;

  /// Ancestry chain of the current highest-weight particle, root to present.
  TrajectoryEstimate best_trajectory() const;

 private:
  struct Generation {
    std::vector<Pose> poses;
    std::vector<std::int32_t> parents;
    std::vector<double> weights;  // normalized, pre-resample
  };

  FilterConfig cfg_;
  std::vector<Particle> particles_;
  std::vector<double> log_weights_;
  // Parent of working particle i in the last stored generation; identity
  // until a resample rewires it.
  std::vector<std::int32_t> pending_parent_;
  std::vector<Generation> history_;
  std::vector<EstimateMode> modes_;
  std::vector<Pose> estimates_;
  Pose estimate_;
};

}  // namespace haploc
