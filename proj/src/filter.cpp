#include "haploc/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace haploc {

void FilterConfig::validate() const {
  if (particle_count < 2) throw std::invalid_argument("particle_count must be >= 2");
  if (!(resample_weight_variance_threshold > 0.0))
    throw std::invalid_argument("resample_weight_variance_threshold must be > 0");
  if (!(xy_variance_gate_factor > 0.0))
    throw std::invalid_argument("xy_variance_gate_factor must be > 0");
  if (!(ess_fraction > 0.0 && ess_fraction <= 1.0))
    throw std::invalid_argument("ess_fraction must lie in (0, 1]");
  likelihood.validate();
  init_cov.validate();
}

NormalizedWeights normalize_log_weights(const std::vector<double>& log_weights) {
  NormalizedWeights out;
  out.weights.resize(log_weights.size());
  const size_t n = log_weights.size();

  double max_log = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights)
    if (std::isfinite(lw)) max_log = std::max(max_log, lw);

  double total = 0.0;
  if (std::isfinite(max_log)) {
    for (size_t i = 0; i < n; ++i) {
      double lw = log_weights[i];
      out.weights[i] = std::isfinite(lw) ? std::exp(lw - max_log) : 0.0;
      total += out.weights[i];
    }
  }
  if (!(total > 0.0)) {
    std::fill(out.weights.begin(), out.weights.end(), 1.0 / double(n));
    out.all_outlier = true;
    return out;
  }
  for (double& w : out.weights) w /= total;
  return out;
}

double weight_variance(const std::vector<double>& weights) {
  const double n = double(weights.size());
  const double mean = 1.0 / n;
  double acc = 0.0;
  for (double w : weights) acc += (w - mean) * (w - mean);
  return acc / n;
}

double effective_sample_size(const std::vector<double>& weights) {
  double sum_sq = 0.0;
  for (double w : weights) sum_sq += w * w;
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

std::vector<std::int32_t> systematic_resample_indices(const std::vector<double>& weights,
                                                      Rng& rng) {
  const size_t n = weights.size();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u0 = unif(rng);

  std::vector<std::int32_t> out(n);
  double cumulative = weights[0];
  size_t src = 0;
  for (size_t j = 0; j < n; ++j) {
    double u = (double(j) + u0) / double(n);
    while (u > cumulative && src + 1 < n) cumulative += weights[++src];
    out[j] = std::int32_t(src);
  }
  return out;
}

namespace {

void resample_in_place(std::vector<Particle>& particles, Rng& rng) {
  std::vector<double> weights(particles.size());
  for (size_t i = 0; i < particles.size(); ++i) weights[i] = particles[i].weight;
  std::vector<std::int32_t> src = systematic_resample_indices(weights, rng);

  std::vector<Particle> next(particles.size());
  for (size_t j = 0; j < particles.size(); ++j) {
    next[j].pose = particles[src[j]].pose;
    next[j].weight = 1.0 / double(particles.size());
    next[j].parent = src[j];
  }
  particles = std::move(next);
}

}  // namespace

bool maybe_resample(std::vector<Particle>& particles, double threshold, Rng& rng) {
  std::vector<double> weights(particles.size());
  for (size_t i = 0; i < particles.size(); ++i) weights[i] = particles[i].weight;
  if (weight_variance(weights) <= threshold) return false;
  resample_in_place(particles, rng);
  return true;
}

GateResult estimate_gate(const std::vector<Particle>& particles, double sampling_var_x,
                         double sampling_var_y, double gate_factor, const Pose& fallback) {
  Vec3 mean_pos = Vec3::Zero();
  double sin_yaw = 0.0, cos_yaw = 0.0;
  double mean_roll = 0.0, mean_pitch = 0.0;
  for (const Particle& p : particles) {
    mean_pos += p.weight * p.pose.position;
    double yaw = p.pose.yaw();
    sin_yaw += p.weight * std::sin(yaw);
    cos_yaw += p.weight * std::cos(yaw);
    mean_roll += p.weight * p.pose.roll();
    mean_pitch += p.weight * p.pose.pitch();
  }
  double mean_yaw = std::atan2(sin_yaw, cos_yaw);

  double var_x = 0.0, var_y = 0.0;
  for (const Particle& p : particles) {
    double dx = p.pose.position.x() - mean_pos.x();
    double dy = p.pose.position.y() - mean_pos.y();
    var_x += p.weight * dx * dx;
    var_y += p.weight * dy * dy;
  }

  GateResult out;
  out.mean_position = mean_pos;
  out.var_x = var_x;
  out.var_y = var_y;
  bool unimodal = var_x <= gate_factor * sampling_var_x && var_y <= gate_factor * sampling_var_y;
  if (unimodal) {
    out.mode = EstimateMode::kFullPose;
    out.pose = Pose::from_rpy(mean_pos, mean_roll, mean_pitch, mean_yaw);
  } else {
    // Multimodal swarm: only z (the main drifting dimension) is trusted.
    out.mode = EstimateMode::kZOnly;
    out.pose = fallback;
    out.pose.position.z() = mean_pos.z();
  }
  return out;
}

Filter::Filter(const FilterConfig& cfg, const Pose& initial_pose, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  const int n = cfg_.particle_count;

  particles_.resize(n);
  log_weights_.assign(n, 0.0);
  pending_parent_.resize(n);
  for (int i = 0; i < n; ++i) {
    particles_[i].pose = sample_pose(initial_pose, cfg_.init_cov, cfg_.sample_mask, rng);
    particles_[i].weight = 1.0 / double(n);
    particles_[i].parent = -1;
    pending_parent_[i] = std::int32_t(i);
  }

  Generation gen;
  gen.parents.assign(n, -1);
  gen.weights.assign(n, 1.0 / double(n));
  gen.poses.reserve(n);
  for (const Particle& p : particles_) gen.poses.push_back(p.pose);
  history_.push_back(std::move(gen));

  GateResult gate = estimate_gate(particles_, cfg_.init_cov.matrix()(0, 0),
                                  cfg_.init_cov.matrix()(1, 1),
                                  cfg_.xy_variance_gate_factor, initial_pose);
  estimate_ = gate.pose;
  estimates_.push_back(estimate_);
}

StepResult Filter::update(const QuadrupedState& prev, const QuadrupedState& curr,
                          const PriorMap& map, Rng& rng) {
  const int n = cfg_.particle_count;
  const Pose delta = relative(prev.odom_pose, curr.odom_pose);

  // Propagate and reweight.
  Generation gen;
  gen.poses.resize(n);
  gen.parents = pending_parent_;
  for (int i = 0; i < n; ++i) {
    Pose propagated = compose(particles_[i].pose, delta);
    Pose sampled = sample_pose(propagated, curr.odom_cov, cfg_.sample_mask, rng);

    double log_lik = 0.0;
    for (int f = 0; f < kFootCount; ++f) {
      if (!curr.contact[f]) continue;
      Vec3 foot_world = transform_point(sampled, curr.foot_in_base[f]);
      if (const ElevationMap* const* grid = std::get_if<const ElevationMap*>(&map)) {
        std::optional<double> r = residual_2p5d(**grid, foot_world);
        if (r) log_lik += log_contact_likelihood(*r, cfg_.likelihood);
        // Off-map / no-data: uninformative, likelihood factor 1.
      } else {
        const PointCloudMap& cloud = *std::get<const PointCloudMap*>(map);
        log_lik += log_contact_likelihood(residual_3d(cloud, foot_world), cfg_.likelihood);
      }
    }

    particles_[i].pose = sampled;
    log_weights_[i] += log_lik;
    gen.poses[i] = sampled;
  }

  NormalizedWeights norm = normalize_log_weights(log_weights_);
  for (int i = 0; i < n; ++i) {
    particles_[i].weight = norm.weights[i];
    log_weights_[i] = std::log(norm.weights[i]);
    particles_[i].parent = gen.parents[i];
  }
  gen.weights = norm.weights;

  StepResult result;
  result.all_outlier = norm.all_outlier;
  result.weight_variance = weight_variance(norm.weights);
  result.effective_sample_size = effective_sample_size(norm.weights);

  // Gate against the odometry-propagated previous estimate.
  const Pose fallback = compose(estimate_, delta);
  GateResult gate =
      estimate_gate(particles_, curr.odom_cov.matrix()(0, 0), curr.odom_cov.matrix()(1, 1),
                    cfg_.xy_variance_gate_factor, fallback);
  if (result.all_outlier && gate.mode == EstimateMode::kFullPose) {
    gate.mode = EstimateMode::kZOnly;
    gate.pose = fallback;
    gate.pose.position.z() = gate.mean_position.z();
  }
  result.mode = gate.mode;
  estimate_ = gate.pose;
  result.estimate = estimate_;

  history_.push_back(std::move(gen));
  modes_.push_back(result.mode);
  estimates_.push_back(estimate_);

  bool trigger = cfg_.resample_trigger == ResampleTrigger::kWeightVariance
                     ? result.weight_variance > cfg_.resample_weight_variance_threshold
                     : result.effective_sample_size < cfg_.ess_fraction * double(n);
  if (trigger) {
    resample_in_place(particles_, rng);
    for (int j = 0; j < n; ++j) pending_parent_[j] = particles_[j].parent;
    log_weights_.assign(n, std::log(1.0 / double(n)));
    result.resampled = true;
  } else {
    for (int i = 0; i < n; ++i) pending_parent_[i] = std::int32_t(i);
  }

  return result;
}

TrajectoryEstimate Filter::estimate_trajectory() const {
  TrajectoryEstimate out;
  out.poses = estimates_;
  out.modes.reserve(estimates_.size());
  out.modes.push_back(EstimateMode::kFullPose);
  out.modes.insert(out.modes.end(), modes_.begin(), modes_.end());
  return out;
}

TrajectoryEstimate Filter::best_trajectory() const {
  const Generation& last = history_.back();
  size_t best = 0;
  for (size_t i = 1; i < last.weights.size(); ++i)
    if (last.weights[i] > last.weights[best]) best = i;

  TrajectoryEstimate out;
  out.poses.resize(history_.size());
  out.modes.resize(history_.size(), EstimateMode::kFullPose);
  std::int32_t idx = std::int32_t(best);
  for (size_t g = history_.size(); g-- > 0;) {
    out.poses[g] = history_[g].poses[idx];
    if (g > 0) out.modes[g] = modes_[g - 1];
    idx = history_[g].parents[idx];
  }
  return out;
}

}  // namespace haploc
