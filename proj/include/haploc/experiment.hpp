#pragma once

#include "haploc/event_log.hpp"
#include "haploc/filter.hpp"
#include "haploc/metrics.hpp"
#include "haploc/sim/probe.hpp"
#include "haploc/sim/terrain.hpp"
#include "haploc/sim/walk.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace haploc {

/// Configuration problems: every offending key is listed, not just the
/// first one found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class Scenario { kTerrainCourse, kWallProbe, kReplay };

/// Exactly one of the three sources must be active.
struct MapSource {
  std::optional<std::string> elevation_file;
  std::optional<std::string> cloud_file;
  std::optional<sim::TerrainSpec> terrain;
  double resolution = 0.02;  // grid resolution for generated terrain
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kTerrainCourse;
  std::optional<std::uint64_t> seed;  // required; never wall-clock seeded
  std::string output_dir = "out";
  MapSource map;
  FilterConfig filter;
  sim::NoiseSpec noise = sim::NoiseSpec::defaults();
  bool dump_particles = false;

  // terrain_course scenario
  sim::GaitSpec gait;
  std::vector<Eigen::Vector2d> waypoints;  // empty: rectangle around the course
  int loops = 2;

  // wall_probe scenario
  double wall_x = 0.8;
  double wall_y = -0.9;
  Vec3 initial_offset = Vec3(0.1, 0.1, 0.0);
  sim::ProbeParams probe;
  sim::ProbeScript script;  // empty: default alternating probe sequence

  // replay scenario
  std::optional<std::string> event_log_file;
};

/// Parses and validates a config document. Unknown keys are rejected;
/// range violations are collected and reported together. Defaults are
/// resolved so the returned struct is complete.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// Fully-resolved config back as a JSON document (what gets echoed into
/// the output directory so every run records its exact parameters).
std::string config_to_json(const ExperimentConfig& cfg);

/// Loaded prior map, either representation.
struct LoadedMap {
  std::optional<ElevationMap> grid;
  std::optional<PointCloudMap> cloud;
  // Course extent for segment labeling, when the map was generated.
  std::optional<Eigen::Vector4d> course_bounds;  // x0, x1, y0, y1

  PriorMap view() const;
};

LoadedMap load_map(const ExperimentConfig& cfg);

/// Events for the configured scenario (simulated, or loaded for replay).
EventLog make_events(const ExperimentConfig& cfg, const LoadedMap& map);

struct RunResult {
  EventLog events;
  TrajectoryEstimate estimate;  // gated per-step estimates
  TrajectoryEstimate best;      // best-particle ancestry
  std::vector<Pose> gt;
  std::vector<Pose> odom;
  std::vector<StepResult> steps;
  TrajectoryErrorReport haptic_report;
  TrajectoryErrorReport odom_report;
};

/// Streams the events through the filter. The filter draws from a substream
/// derived from `seed`, independent of the simulator's, so replaying a
/// recorded log reproduces the in-process run exactly.
RunResult run_localization(const EventLog& events, const PriorMap& map,
                           const FilterConfig& filter_cfg, std::uint64_t seed,
                           const std::optional<Eigen::Vector4d>& course_bounds = {},
                           std::vector<std::vector<Particle>>* particle_dump = nullptr);

/// Full pipeline: map, events, filter, reports, artifact files under
/// cfg.output_dir.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Trajectory CSV: k, position, quaternion and (for estimates) the gate
/// mode per step.
void save_trajectory_csv(const std::vector<Pose>& poses,
                         const std::vector<EstimateMode>& modes, const std::string& path);
std::vector<Pose> load_trajectory_csv(const std::string& path);

void save_particle_dump_csv(const std::vector<std::vector<Particle>>& generations,
                            const std::string& path);

/// Step labels ("course"/"flat") from ground-truth positions, for
/// per-segment error stats.
std::vector<std::string> segment_labels(const std::vector<Pose>& gt,
                                        const Eigen::Vector4d& course_bounds);

}  // namespace haploc
