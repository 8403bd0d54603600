#include "haploc/experiment.hpp"

#include "haploc/map_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace haploc {

PriorMap LoadedMap::view() const {
  if (grid) return PriorMap(&*grid);
  return PriorMap(&*cloud);
}

LoadedMap load_map(const ExperimentConfig& cfg) {
  LoadedMap out;
  if (cfg.map.elevation_file) {
    out.grid = load_elevation_map_file(*cfg.map.elevation_file);
    return out;
  }
  if (cfg.map.cloud_file) {
    out.cloud = PointCloudMap(voxel_downsample(load_xyz_file(*cfg.map.cloud_file)));
    return out;
  }
  if (cfg.scenario == Scenario::kWallProbe) {
    out.cloud = PointCloudMap(sim::probe_room_cloud(cfg.wall_x, cfg.wall_y));
    return out;
  }
  // Generated terrain (explicit spec or the default course).
  sim::TerrainSpec spec = cfg.map.terrain ? *cfg.map.terrain : sim::default_terrain_course();
  out.grid = sim::build_terrain(spec, cfg.map.resolution);
  out.course_bounds = Eigen::Vector4d(0.0, spec.course_length(), -spec.width / 2.0,
                                      spec.width / 2.0);
  return out;
}

namespace {

std::vector<Eigen::Vector2d> default_course_waypoints(const ExperimentConfig& cfg,
                                                      const LoadedMap& map) {
  if (!cfg.waypoints.empty()) {
    std::vector<Eigen::Vector2d> path = {cfg.waypoints.front()};
    for (int loop = 0; loop < cfg.loops; ++loop)
      path.insert(path.end(), cfg.waypoints.begin() + 1, cfg.waypoints.end());
    return path;
  }
  if (!map.course_bounds)
    throw ConfigError(
        {"config.waypoints is required when the map does not come from a terrain spec"});

  // Rectangle over the course and back across flat ground.
  const double lead = 1.0;
  const double x0 = (*map.course_bounds)(0) - lead;
  const double x1 = (*map.course_bounds)(1) + lead;
  const double y_back = (*map.course_bounds)(2) - 2.07;
  std::vector<Eigen::Vector2d> loop = {{x1, 0.0}, {x1, y_back}, {x0, y_back}, {x0, 0.0}};
  std::vector<Eigen::Vector2d> path = {{x0, 0.0}};
  for (int i = 0; i < cfg.loops; ++i) path.insert(path.end(), loop.begin(), loop.end());
  return path;
}

}  // namespace

EventLog make_events(const ExperimentConfig& cfg, const LoadedMap& map) {
  Rng sim_rng(derive_seed(*cfg.seed, 0));
  switch (cfg.scenario) {
    case Scenario::kTerrainCourse: {
      if (!map.grid)
        throw ConfigError({"terrain_course scenario needs a 2.5D map"});
      return sim::simulate_walk(*map.grid, cfg.gait, cfg.noise,
                                default_course_waypoints(cfg, map), sim_rng);
    }
    case Scenario::kWallProbe: {
      if (!map.cloud) throw ConfigError({"wall_probe scenario needs a point cloud map"});
      sim::ProbeScript script =
          cfg.script.items.empty() ? sim::default_probe_script() : cfg.script;
      sim::ProbeParams params = cfg.probe;
      params.gait = cfg.gait;
      return sim::simulate_probing(*map.cloud, script, cfg.noise, cfg.initial_offset,
                                   params, sim_rng);
    }
    case Scenario::kReplay:
      return load_event_log_file(*cfg.event_log_file);
  }
  throw std::logic_error("unreachable scenario");
}

std::vector<std::string> segment_labels(const std::vector<Pose>& gt,
                                        const Eigen::Vector4d& course_bounds) {
  std::vector<std::string> labels;
  labels.reserve(gt.size());
  for (const Pose& p : gt) {
    bool on_course = p.position.x() >= course_bounds(0) &&
                     p.position.x() < course_bounds(1) &&
                     p.position.y() >= course_bounds(2) &&
                     p.position.y() < course_bounds(3);
    labels.emplace_back(on_course ? "course" : "flat");
  }
  return labels;
}

RunResult run_localization(const EventLog& events, const PriorMap& map,
                           const FilterConfig& filter_cfg, std::uint64_t seed,
                           const std::optional<Eigen::Vector4d>& course_bounds,
                           std::vector<std::vector<Particle>>* particle_dump) {
  if (events.empty()) throw std::invalid_argument("event log is empty");

  Rng filter_rng(derive_seed(seed, 1));
  RunResult result;
  result.events = events;

  Filter filter(filter_cfg, events.front().state.odom_pose, filter_rng);
  if (particle_dump) particle_dump->push_back(filter.particles());

  result.gt.reserve(events.size());
  result.odom.reserve(events.size());
  result.gt.push_back(events.front().gt_pose);
  result.odom.push_back(events.front().state.odom_pose);

  for (size_t i = 1; i < events.size(); ++i) {
    StepResult step =
        filter.update(events[i - 1].state, events[i].state, map, filter_rng);
    result.steps.push_back(step);
    result.gt.push_back(events[i].gt_pose);
    result.odom.push_back(events[i].state.odom_pose);
    if (particle_dump) particle_dump->push_back(filter.particles());
  }

  result.estimate = filter.estimate_trajectory();
  result.best = filter.best_trajectory();

  std::vector<std::string> labels;
  if (course_bounds) labels = segment_labels(result.gt, *course_bounds);
  result.haptic_report = ate(result.estimate.poses, result.gt, labels);
  result.odom_report = ate(result.odom, result.gt, labels);
  return result;
}

void save_trajectory_csv(const std::vector<Pose>& poses,
                         const std::vector<EstimateMode>& modes, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  bool with_mode = !modes.empty();
  f << (with_mode ? "k,x,y,z,qx,qy,qz,qw,mode\n" : "k,x,y,z,qx,qy,qz,qw\n");
  for (size_t i = 0; i < poses.size(); ++i) {
    const Pose& p = poses[i];
    f << i << "," << format_double(p.position.x()) << "," << format_double(p.position.y())
      << "," << format_double(p.position.z()) << "," << format_double(p.orientation.x())
      << "," << format_double(p.orientation.y()) << "," << format_double(p.orientation.z())
      << "," << format_double(p.orientation.w());
    if (with_mode)
      f << "," << (modes[i] == EstimateMode::kFullPose ? "full" : "z_only");
    f << "\n";
  }
}

std::vector<Pose> load_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::vector<Pose> poses;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line.rfind("k,", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (fields.size() < 8) throw ParseError("expected at least 8 fields", line_no);
    auto num = [&](const std::string& s) {
      double v = 0.0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc{}) throw ParseError("bad number '" + s + "'", line_no);
      return v;
    };
    Pose p;
    p.position = Vec3(num(fields[1]), num(fields[2]), num(fields[3]));
    p.orientation =
        Quat(num(fields[7]), num(fields[4]), num(fields[5]), num(fields[6]));
    poses.push_back(p);
  }
  return poses;
}

void save_particle_dump_csv(const std::vector<std::vector<Particle>>& generations,
                            const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f << "step,particle_id,x,y,z,yaw,weight,parent\n";
  for (size_t step = 0; step < generations.size(); ++step) {
    for (size_t i = 0; i < generations[step].size(); ++i) {
      const Particle& p = generations[step][i];
      f << step << "," << i << "," << format_double(p.pose.position.x()) << ","
        << format_double(p.pose.position.y()) << "," << format_double(p.pose.position.z())
        << "," << format_double(p.pose.yaw()) << "," << format_double(p.weight) << ","
        << p.parent << "\n";
    }
  }
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  LoadedMap map = load_map(cfg);
  EventLog events = make_events(cfg, map);

  std::vector<std::vector<Particle>> dump;
  RunResult result =
      run_localization(events, map.view(), cfg.filter, *cfg.seed, map.course_bounds,
                       cfg.dump_particles ? &dump : nullptr);

  fs::create_directories(cfg.output_dir);
  auto out_path = [&](const char* name) { return (fs::path(cfg.output_dir) / name).string(); };

  {
    std::ofstream f(out_path("resolved_config.json"));
    f << config_to_json(cfg) << "\n";
  }
  save_event_log_file(events, out_path("events.csv"));
  save_trajectory_csv(result.estimate.poses, result.estimate.modes, out_path("estimate.csv"));
  save_trajectory_csv(result.best.poses, result.best.modes, out_path("best_trajectory.csv"));
  save_trajectory_csv(result.gt, {}, out_path("gt.csv"));
  save_trajectory_csv(result.odom, {}, out_path("odom.csv"));
  if (cfg.dump_particles) save_particle_dump_csv(dump, out_path("particles.csv"));

  {
    std::ofstream f(out_path("metrics.json"));
    f << "{\n\"haptic\": " << report_to_json(result.haptic_report)
      << ",\n\"odometry\": " << report_to_json(result.odom_report) << "\n}\n";
  }
  save_error_trace_csv(result.haptic_report, out_path("error_trace.csv"));
  return result;
}

}  // namespace haploc
