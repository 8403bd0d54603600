// haploc command line: seeded, reproducible localization experiments.
//
//   haploc run       --config cfg.json [--seed N] [--out DIR] [--particles N]
//                    [--dump-particles]
//   haploc simulate  --config cfg.json [--seed N] --events out.csv
//   haploc localize  --config cfg.json --events log.csv [--seed N] [--out DIR]
//   haploc metrics   --estimate est.csv --gt gt.csv [--out report.json]
//   haploc rasterize --cloud in.xyz --resolution R --out map.grid [--voxel S]
//
// Exit codes: 0 success, 2 configuration or input error.

#include "haploc/experiment.hpp"
#include "haploc/map_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfigError = 2;

struct CommonOpts {
  std::string config_path;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> particles;
  bool dump_particles = false;
};

haploc::ExperimentConfig resolve_config(const CommonOpts& opts) {
  haploc::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = haploc::load_config_file(opts.config_path);
  } else if (!opts.scenario.empty()) {
    cfg = haploc::parse_config("{\"scenario\": \"" + opts.scenario + "\", \"seed\": 0}");
    cfg.seed.reset();
  } else {
    throw haploc::ConfigError({"pass --config <file> or --scenario <name>"});
  }
  if (!opts.scenario.empty() && !opts.config_path.empty()) {
    haploc::ExperimentConfig with_scenario =
        haploc::parse_config("{\"scenario\": \"" + opts.scenario + "\", \"seed\": 0}");
    cfg.scenario = with_scenario.scenario;
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (opts.particles) cfg.filter.particle_count = *opts.particles;
  if (opts.dump_particles) cfg.dump_particles = true;
  if (!cfg.seed) throw haploc::ConfigError({"config.seed is required (or pass --seed)"});
  cfg.filter.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_run_flags) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
  cmd->add_option("--scenario", opts.scenario,
                  "terrain_course|wall_probe (defaults config when no --config)");
  cmd->add_option("--seed", opts.seed, "override config.seed");
  if (with_run_flags) {
    cmd->add_option("--out", opts.out_dir, "override config.output_dir");
    cmd->add_option("--particles", opts.particles, "override filter.particles");
    cmd->add_flag("--dump-particles", opts.dump_particles, "write per-step particle CSV");
  }
}

int degenerate_steps(const haploc::RunResult& result) {
  int n = 0;
  for (const haploc::StepResult& s : result.steps) n += s.all_outlier ? 1 : 0;
  return n;
}

int cmd_run(const CommonOpts& opts) {
  haploc::ExperimentConfig cfg = resolve_config(opts);
  haploc::RunResult result = haploc::run_experiment(cfg);
  std::cout << "events: " << result.events.size()
            << "  haptic ATE mean: " << result.haptic_report.ate_mean
            << " m  odometry ATE mean: " << result.odom_report.ate_mean << " m\n"
            << "outputs in " << cfg.output_dir << "\n";
  if (int n = degenerate_steps(result); n > 0)
    std::cerr << "note: " << n << " all-outlier update(s), weights were reset\n";
  return 0;
}

int cmd_simulate(const CommonOpts& opts, const std::string& events_path) {
  haploc::ExperimentConfig cfg = resolve_config(opts);
  haploc::LoadedMap map = haploc::load_map(cfg);
  haploc::EventLog events = haploc::make_events(cfg, map);
  haploc::save_event_log_file(events, events_path);
  std::cout << "wrote " << events.size() << " events to " << events_path << "\n";
  return 0;
}

int cmd_localize(const CommonOpts& opts, const std::string& events_path) {
  haploc::ExperimentConfig cfg = resolve_config(opts);
  cfg.scenario = haploc::Scenario::kReplay;
  cfg.event_log_file = events_path;
  haploc::RunResult result = haploc::run_experiment(cfg);
  std::cout << "replayed " << result.events.size()
            << " events  haptic ATE mean: " << result.haptic_report.ate_mean << " m\n"
            << "outputs in " << cfg.output_dir << "\n";
  if (int n = degenerate_steps(result); n > 0)
    std::cerr << "note: " << n << " all-outlier update(s), weights were reset\n";
  return 0;
}

int cmd_metrics(const std::string& est_path, const std::string& gt_path,
                const std::string& out_path) {
  std::vector<haploc::Pose> est = haploc::load_trajectory_csv(est_path);
  std::vector<haploc::Pose> gt = haploc::load_trajectory_csv(gt_path);
  haploc::TrajectoryErrorReport report = haploc::ate(est, gt);
  std::string doc = haploc::report_to_json(report);
  if (out_path.empty()) {
    std::cout << doc << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write file: " + out_path);
    f << doc << "\n";
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_rasterize(const std::string& cloud_path, double resolution, double voxel,
                  const std::string& out_path) {
  std::vector<haploc::Vec3> points = haploc::load_xyz_file(cloud_path);
  if (voxel > 0.0) points = haploc::voxel_downsample(points, voxel);
  haploc::PointCloudMap cloud(std::move(points));
  haploc::ElevationMap map = haploc::rasterize(cloud, resolution);
  haploc::save_elevation_map_file(map, out_path);
  std::cout << "wrote " << map.rows() << "x" << map.cols() << " grid to " << out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"haptic Monte Carlo localization experiments"};
  app.require_subcommand(1);

  CommonOpts run_opts, sim_opts, loc_opts;
  std::string sim_events, loc_events;
  std::string met_est, met_gt, met_out;
  std::string ras_cloud, ras_out;
  double ras_resolution = 0.0, ras_voxel = 0.0;

  CLI::App* run = app.add_subcommand("run", "simulate + localize + metrics");
  add_common(run, run_opts, true);

  CLI::App* simulate = app.add_subcommand("simulate", "emit an event log only");
  add_common(simulate, sim_opts, false);
  simulate->add_option("--events", sim_events, "output event log CSV")->required();

  CLI::App* localize = app.add_subcommand("localize", "run the filter over an event log");
  add_common(localize, loc_opts, true);
  localize->add_option("--events", loc_events, "input event log CSV")->required();

  CLI::App* metrics = app.add_subcommand("metrics", "trajectory error report");
  metrics->add_option("--estimate", met_est, "estimated trajectory CSV")->required();
  metrics->add_option("--gt", met_gt, "ground truth trajectory CSV")->required();
  metrics->add_option("--out", met_out, "report JSON path (default: stdout)");

  CLI::App* rasterize = app.add_subcommand("rasterize", "point cloud to elevation grid");
  rasterize->add_option("--cloud", ras_cloud, "input XYZ cloud")->required();
  rasterize->add_option("--resolution", ras_resolution, "grid resolution (m)")->required();
  rasterize->add_option("--out", ras_out, "output grid file")->required();
  rasterize->add_option("--voxel", ras_voxel, "voxel downsample spacing (m)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (simulate->parsed()) return cmd_simulate(sim_opts, sim_events);
    if (localize->parsed()) return cmd_localize(loc_opts, loc_events);
    if (metrics->parsed()) return cmd_metrics(met_est, met_gt, met_out);
    if (rasterize->parsed()) return cmd_rasterize(ras_cloud, ras_resolution, ras_voxel, ras_out);
  } catch (const haploc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return 0;
}
