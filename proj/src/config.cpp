#include "haploc/experiment.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace haploc {

using nlohmann::json;

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "invalid configuration (" << problems.size() << " problem"
            << (problems.size() == 1 ? "" : "s") << "):";
        for (const std::string& p : problems) msg << "\n  - " << p;
        return msg.str();
      }()),
      problems_(problems) {}

namespace {

struct Validator {
  std::vector<std::string> problems;

  void fail(const std::string& msg) { problems.push_back(msg); }
  void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
  }
  void finish() const {
    if (!problems.empty()) throw ConfigError(problems);
  }
};

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed, Validator& v) {
  if (!j.is_object()) {
    v.fail(path + " must be an object");
    return;
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) v.fail("unknown key: " + path + "." + item.key());
  }
}

template <typename T>
T field(const json& j, const char* key, T fallback, const std::string& path, Validator& v) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    v.fail(path + "." + key + " has the wrong type");
    return fallback;
  }
}

template <int N>
Eigen::Matrix<double, N, 1> vector_field(const json& j, const char* key,
                                         const Eigen::Matrix<double, N, 1>& fallback,
                                         const std::string& path, Validator& v) {
  if (!j.contains(key)) return fallback;
  const json& arr = j.at(key);
  if (!arr.is_array() || arr.size() != N) {
    v.fail(path + "." + key + " must be an array of " + std::to_string(N) + " numbers");
    return fallback;
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!arr[i].is_number()) {
      v.fail(path + "." + key + " must be numeric");
      return fallback;
    }
    out(i) = arr[i].get<double>();
  }
  return out;
}

sim::TerrainSpec parse_terrain(const json& j, const std::string& path, Validator& v) {
  check_keys(j, path, {"width", "surround_margin", "segments"}, v);
  sim::TerrainSpec spec = sim::default_terrain_course();
  spec.segments.clear();
  spec.width = field(j, "width", 1.0, path, v);
  spec.surround_margin = field(j, "surround_margin", 3.0, path, v);
  v.require(spec.width > 0.0, path + ".width must be > 0");
  v.require(spec.surround_margin >= 0.0, path + ".surround_margin must be >= 0");

  if (!j.contains("segments")) {
    v.fail(path + ".segments is required");
    return spec;
  }
  const json& segs = j.at("segments");
  if (!segs.is_array() || segs.empty()) {
    v.fail(path + ".segments must be a non-empty array");
    return spec;
  }
  for (size_t i = 0; i < segs.size(); ++i) {
    const std::string seg_path = path + ".segments[" + std::to_string(i) + "]";
    const json& s = segs[i];
    std::string type = field<std::string>(s, "type", "", seg_path, v);
    if (type == "flat") {
      check_keys(s, seg_path, {"type", "length", "height"}, v);
      sim::Flat f{field(s, "length", 0.0, seg_path, v), field(s, "height", 0.0, seg_path, v)};
      v.require(f.length > 0.0, seg_path + ".length must be > 0");
      spec.segments.push_back(f);
    } else if (type == "ramp") {
      check_keys(s, seg_path, {"type", "length", "grade_deg"}, v);
      sim::Ramp r{field(s, "length", 0.0, seg_path, v),
                  field(s, "grade_deg", 0.0, seg_path, v)};
      v.require(r.length > 0.0, seg_path + ".length must be > 0");
      v.require(std::abs(r.grade_deg) < 90.0, seg_path + ".grade_deg must be in (-90, 90)");
      spec.segments.push_back(r);
    } else if (type == "chevron") {
      check_keys(s, seg_path, {"type", "tooth_height", "pitch", "count"}, v);
      sim::Chevron c{field(s, "tooth_height", 0.0, seg_path, v),
                     field(s, "pitch", 0.0, seg_path, v), field(s, "count", 0, seg_path, v)};
      v.require(c.tooth_height > 0.0, seg_path + ".tooth_height must be > 0");
      v.require(c.pitch > 0.0, seg_path + ".pitch must be > 0");
      v.require(c.count >= 1, seg_path + ".count must be >= 1");
      spec.segments.push_back(c);
    } else if (type == "block_field") {
      check_keys(s, seg_path, {"type", "cell_size", "heights"}, v);
      sim::BlockField b;
      b.cell_size = field(s, "cell_size", 0.0, seg_path, v);
      b.heights = field(s, "heights", std::vector<double>{}, seg_path, v);
      v.require(b.cell_size > 0.0, seg_path + ".cell_size must be > 0");
      v.require(!b.heights.empty(), seg_path + ".heights must be non-empty");
      spec.segments.push_back(b);
    } else {
      v.fail(seg_path + ".type must be one of flat|ramp|chevron|block_field");
    }
  }
  return spec;
}

SampleSpaceMask parse_mask(const json& arr, const std::string& path, Validator& v) {
  SampleSpaceMask mask{false, false, false, false};
  if (!arr.is_array()) {
    v.fail(path + " must be an array of dimension names");
    return SampleSpaceMask::all();
  }
  for (const json& d : arr) {
    std::string name = d.is_string() ? d.get<std::string>() : "";
    if (name == "x")
      mask.x = true;
    else if (name == "y")
      mask.y = true;
    else if (name == "z")
      mask.z = true;
    else if (name == "yaw")
      mask.yaw = true;
    else
      v.fail(path + ": '" + name + "' is not a sampleable dimension (x, y, z, yaw)");
  }
  return mask;
}

FilterConfig parse_filter(const json& j, const std::string& path, Validator& v) {
  check_keys(j, path,
             {"particles", "init_sigma", "sigma_z", "rho",
              "resample_weight_variance_threshold", "xy_variance_gate_factor",
              "sample_mask", "resample_trigger", "ess_fraction"},
             v);
  FilterConfig cfg;
  cfg.particle_count = field(j, "particles", cfg.particle_count, path, v);
  v.require(cfg.particle_count >= 2, path + ".particles must be >= 2");

  Vec6 sigma = vector_field<6>(j, "init_sigma",
                               (Vec6() << 0.2, 0.2, 0.2, 0.0, 0.0, 0.1).finished(), path, v);
  v.require((sigma.array() >= 0.0).all(), path + ".init_sigma must be >= 0");
  if ((sigma.array() >= 0.0).all())
    cfg.init_cov = Covariance6::from_diagonal(sigma.cwiseProduct(sigma));

  double sigma_z = field(j, "sigma_z", 0.01, path, v);
  v.require(sigma_z > 0.0, path + ".sigma_z must be > 0");
  if (sigma_z > 0.0) cfg.likelihood = LikelihoodConfig::with_sigma(sigma_z);
  if (j.contains("rho")) {
    cfg.likelihood.rho = field(j, "rho", cfg.likelihood.rho, path, v);
    v.require(cfg.likelihood.rho > 0.0 &&
                  cfg.likelihood.rho < gaussian_pdf(0.0, cfg.likelihood.sigma_z),
              path + ".rho must lie in (0, gaussian peak)");
  }

  cfg.resample_weight_variance_threshold = field(
      j, "resample_weight_variance_threshold", cfg.resample_weight_variance_threshold,
      path, v);
  v.require(cfg.resample_weight_variance_threshold > 0.0,
            path + ".resample_weight_variance_threshold must be > 0");
  cfg.xy_variance_gate_factor =
      field(j, "xy_variance_gate_factor", cfg.xy_variance_gate_factor, path, v);
  v.require(cfg.xy_variance_gate_factor > 0.0,
            path + ".xy_variance_gate_factor must be > 0");

  if (j.contains("sample_mask")) cfg.sample_mask = parse_mask(j.at("sample_mask"), path + ".sample_mask", v);

  std::string trigger = field<std::string>(j, "resample_trigger", "weight_variance", path, v);
  if (trigger == "weight_variance")
    cfg.resample_trigger = ResampleTrigger::kWeightVariance;
  else if (trigger == "ess")
    cfg.resample_trigger = ResampleTrigger::kEss;
  else
    v.fail(path + ".resample_trigger must be weight_variance|ess");
  cfg.ess_fraction = field(j, "ess_fraction", cfg.ess_fraction, path, v);
  v.require(cfg.ess_fraction > 0.0 && cfg.ess_fraction <= 1.0,
            path + ".ess_fraction must lie in (0, 1]");
  return cfg;
}

sim::NoiseSpec parse_noise(const json& j, const std::string& path, Validator& v) {
  check_keys(j, path, {"stddev", "bias_z", "bias_yaw", "cov_inflation", "reported_floor"},
             v);
  sim::NoiseSpec noise = sim::NoiseSpec::defaults();
  noise.stddev = vector_field<4>(j, "stddev", noise.stddev, path, v);
  noise.bias_z = field(j, "bias_z", noise.bias_z, path, v);
  noise.bias_yaw = field(j, "bias_yaw", noise.bias_yaw, path, v);
  noise.cov_inflation = field(j, "cov_inflation", noise.cov_inflation, path, v);
  noise.reported_floor = vector_field<4>(j, "reported_floor", noise.reported_floor, path, v);
  v.require((noise.stddev.array() >= 0.0).all(), path + ".stddev must be >= 0");
  v.require((noise.reported_floor.array() >= 0.0).all(),
            path + ".reported_floor must be >= 0");
  v.require(noise.cov_inflation > 0.0, path + ".cov_inflation must be > 0");
  return noise;
}

sim::GaitSpec parse_gait(const json& j, const std::string& path, Validator& v) {
  check_keys(j, path,
             {"step_length", "stance_width", "foot_offsets", "steps_per_support_phase"}, v);
  sim::GaitSpec gait;
  gait.step_length = field(j, "step_length", gait.step_length, path, v);
  gait.stance_width = field(j, "stance_width", gait.stance_width, path, v);
  gait.steps_per_support_phase =
      field(j, "steps_per_support_phase", gait.steps_per_support_phase, path, v);
  v.require(gait.step_length > 0.0, path + ".step_length must be > 0");
  v.require(gait.stance_width > 0.0, path + ".stance_width must be > 0");
  v.require(gait.steps_per_support_phase == 1, path + ".steps_per_support_phase must be 1");
  if (j.contains("foot_offsets")) {
    const json& feet = j.at("foot_offsets");
    if (!feet.is_array() || feet.size() != kFootCount) {
      v.fail(path + ".foot_offsets must be 4 arrays of 3 numbers");
    } else {
      for (int f = 0; f < kFootCount; ++f) {
        const json& foot = feet[f];
        if (!foot.is_array() || foot.size() != 3 || !foot[0].is_number()) {
          v.fail(path + ".foot_offsets[" + std::to_string(f) + "] must be [x, y, z]");
          continue;
        }
        gait.foot_offsets[f] =
            Vec3(foot[0].get<double>(), foot[1].get<double>(), foot[2].get<double>());
      }
    }
  }
  return gait;
}

sim::ProbeScript parse_script(const json& arr, const std::string& path, Validator& v) {
  sim::ProbeScript script;
  if (!arr.is_array()) {
    v.fail(path + " must be an array");
    return script;
  }
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string item_path = path + "[" + std::to_string(i) + "]";
    const json& item = arr[i];
    std::string action = field<std::string>(item, "action", "", item_path, v);
    if (action == "walk") {
      check_keys(item, item_path, {"action", "direction", "distance"}, v);
      sim::WalkAction w;
      Eigen::Vector2d dir =
          vector_field<2>(item, "direction", Eigen::Vector2d(0, -1), item_path, v);
      w.direction = dir;
      w.distance = field(item, "distance", 0.0, item_path, v);
      v.require(w.distance > 0.0, item_path + ".distance must be > 0");
      v.require(dir.norm() > 0.0, item_path + ".direction must be non-zero");
      script.items.push_back(w);
    } else if (action == "probe") {
      check_keys(item, item_path, {"action", "foot", "direction"}, v);
      sim::ProbeAction p;
      std::string foot = field<std::string>(item, "foot", "RF", item_path, v);
      if (foot == "LF")
        p.foot = kLF;
      else if (foot == "RF")
        p.foot = kRF;
      else if (foot == "LH")
        p.foot = kLH;
      else if (foot == "RH")
        p.foot = kRH;
      else
        v.fail(item_path + ".foot must be LF|RF|LH|RH");
      Vec3 dir = vector_field<3>(item, "direction", Vec3(1, 0, 0), item_path, v);
      v.require(dir.norm() > 0.0, item_path + ".direction must be non-zero");
      p.direction = dir;
      script.items.push_back(p);
    } else {
      v.fail(item_path + ".action must be walk|probe");
    }
  }
  return script;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  Validator v;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    v.fail(std::string("not valid JSON: ") + e.what());
    v.finish();
  }

  check_keys(j, "config",
             {"scenario", "seed", "output_dir", "dump_particles", "map", "filter", "noise",
              "gait", "waypoints", "loops", "wall_x", "wall_y", "initial_offset", "probe",
              "script", "event_log_file"},
             v);

  ExperimentConfig cfg;
  std::string scenario = field<std::string>(j, "scenario", "terrain_course", "config", v);
  if (scenario == "terrain_course")
    cfg.scenario = Scenario::kTerrainCourse;
  else if (scenario == "wall_probe")
    cfg.scenario = Scenario::kWallProbe;
  else if (scenario == "replay")
    cfg.scenario = Scenario::kReplay;
  else
    v.fail("config.scenario must be terrain_course|wall_probe|replay");

  if (j.contains("seed")) cfg.seed = field<std::uint64_t>(j, "seed", 0, "config", v);
  cfg.output_dir = field<std::string>(j, "output_dir", cfg.output_dir, "config", v);
  cfg.dump_particles = field(j, "dump_particles", false, "config", v);

  if (j.contains("map")) {
    const json& m = j.at("map");
    check_keys(m, "config.map", {"elevation_file", "cloud_file", "terrain", "resolution"},
               v);
    if (m.contains("elevation_file"))
      cfg.map.elevation_file = field<std::string>(m, "elevation_file", "", "config.map", v);
    if (m.contains("cloud_file"))
      cfg.map.cloud_file = field<std::string>(m, "cloud_file", "", "config.map", v);
    if (m.contains("terrain"))
      cfg.map.terrain = parse_terrain(m.at("terrain"), "config.map.terrain", v);
    cfg.map.resolution = field(m, "resolution", cfg.map.resolution, "config.map", v);
    v.require(cfg.map.resolution > 0.0, "config.map.resolution must be > 0");

    int sources = int(cfg.map.elevation_file.has_value()) +
                  int(cfg.map.cloud_file.has_value()) + int(cfg.map.terrain.has_value());
    v.require(sources <= 1,
              "config.map: elevation_file, cloud_file and terrain are mutually exclusive");
  }

  if (j.contains("filter")) cfg.filter = parse_filter(j.at("filter"), "config.filter", v);
  if (j.contains("noise")) cfg.noise = parse_noise(j.at("noise"), "config.noise", v);
  if (j.contains("gait")) cfg.gait = parse_gait(j.at("gait"), "config.gait", v);

  if (j.contains("waypoints")) {
    const json& wps = j.at("waypoints");
    // An empty list means "use the scenario default rectangle".
    if (!wps.is_array() || wps.size() == 1) {
      v.fail("config.waypoints must be an array of at least two [x, y] pairs");
    } else {
      for (const json& wp : wps) {
        if (!wp.is_array() || wp.size() != 2 || !wp[0].is_number()) {
          v.fail("config.waypoints entries must be [x, y]");
          break;
        }
        cfg.waypoints.emplace_back(wp[0].get<double>(), wp[1].get<double>());
      }
    }
  }
  cfg.loops = field(j, "loops", cfg.loops, "config", v);
  v.require(cfg.loops >= 1, "config.loops must be >= 1");

  cfg.wall_x = field(j, "wall_x", cfg.wall_x, "config", v);
  cfg.wall_y = field(j, "wall_y", cfg.wall_y, "config", v);
  cfg.initial_offset = vector_field<3>(j, "initial_offset", cfg.initial_offset, "config", v);

  if (j.contains("probe")) {
    const json& p = j.at("probe");
    check_keys(p, "config.probe", {"workspace_reach", "probe_lift", "contact_epsilon"}, v);
    cfg.probe.workspace_reach =
        field(p, "workspace_reach", cfg.probe.workspace_reach, "config.probe", v);
    cfg.probe.probe_lift = field(p, "probe_lift", cfg.probe.probe_lift, "config.probe", v);
    cfg.probe.contact_epsilon =
        field(p, "contact_epsilon", cfg.probe.contact_epsilon, "config.probe", v);
    v.require(cfg.probe.workspace_reach > 0.0, "config.probe.workspace_reach must be > 0");
    v.require(cfg.probe.probe_lift >= 0.0, "config.probe.probe_lift must be >= 0");
    v.require(cfg.probe.contact_epsilon > 0.0, "config.probe.contact_epsilon must be > 0");
  }
  cfg.probe.gait = cfg.gait;

  if (j.contains("script")) cfg.script = parse_script(j.at("script"), "config.script", v);
  if (j.contains("event_log_file"))
    cfg.event_log_file = field<std::string>(j, "event_log_file", "", "config", v);

  // Cross-field requirements.
  v.require(cfg.seed.has_value(), "config.seed is required (runs are never wall-clock seeded)");
  if (cfg.scenario == Scenario::kReplay)
    v.require(cfg.event_log_file.has_value(),
              "config.event_log_file is required for the replay scenario");
  if (cfg.scenario == Scenario::kWallProbe)
    v.require(!cfg.map.elevation_file.has_value() && !cfg.map.terrain.has_value(),
              "config.map: wall_probe needs a point cloud (cloud_file or the built-in room)");

  v.finish();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"cannot open config file: " + path});
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

namespace {

json terrain_to_json(const sim::TerrainSpec& spec) {
  json segs = json::array();
  for (const sim::TerrainSegment& seg : spec.segments) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, sim::Flat>)
            segs.push_back({{"type", "flat"}, {"length", s.length}, {"height", s.height}});
          else if constexpr (std::is_same_v<T, sim::Ramp>)
            segs.push_back(
                {{"type", "ramp"}, {"length", s.length}, {"grade_deg", s.grade_deg}});
          else if constexpr (std::is_same_v<T, sim::Chevron>)
            segs.push_back({{"type", "chevron"},
                            {"tooth_height", s.tooth_height},
                            {"pitch", s.pitch},
                            {"count", s.count}});
          else
            segs.push_back({{"type", "block_field"},
                            {"cell_size", s.cell_size},
                            {"heights", s.heights}});
        },
        seg);
  }
  return {{"width", spec.width}, {"surround_margin", spec.surround_margin},
          {"segments", segs}};
}

json mask_to_json(const SampleSpaceMask& mask) {
  json out = json::array();
  if (mask.x) out.push_back("x");
  if (mask.y) out.push_back("y");
  if (mask.z) out.push_back("z");
  if (mask.yaw) out.push_back("yaw");
  return out;
}

const char* foot_name(int foot) {
  switch (foot) {
    case kLF: return "LF";
    case kRF: return "RF";
    case kLH: return "LH";
    default: return "RH";
  }
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  switch (cfg.scenario) {
    case Scenario::kTerrainCourse: j["scenario"] = "terrain_course"; break;
    case Scenario::kWallProbe: j["scenario"] = "wall_probe"; break;
    case Scenario::kReplay: j["scenario"] = "replay"; break;
  }
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["dump_particles"] = cfg.dump_particles;

  json map;
  if (cfg.map.elevation_file) map["elevation_file"] = *cfg.map.elevation_file;
  if (cfg.map.cloud_file) map["cloud_file"] = *cfg.map.cloud_file;
  if (cfg.map.terrain) map["terrain"] = terrain_to_json(*cfg.map.terrain);
  map["resolution"] = cfg.map.resolution;
  j["map"] = map;

  Vec6 init_var = cfg.filter.init_cov.diagonal();
  j["filter"] = {
      {"particles", cfg.filter.particle_count},
      {"init_sigma",
       {std::sqrt(init_var(0)), std::sqrt(init_var(1)), std::sqrt(init_var(2)),
        std::sqrt(init_var(3)), std::sqrt(init_var(4)), std::sqrt(init_var(5))}},
      {"sigma_z", cfg.filter.likelihood.sigma_z},
      {"rho", cfg.filter.likelihood.rho},
      {"resample_weight_variance_threshold", cfg.filter.resample_weight_variance_threshold},
      {"xy_variance_gate_factor", cfg.filter.xy_variance_gate_factor},
      {"sample_mask", mask_to_json(cfg.filter.sample_mask)},
      {"resample_trigger", cfg.filter.resample_trigger == ResampleTrigger::kWeightVariance
                               ? "weight_variance"
                               : "ess"},
      {"ess_fraction", cfg.filter.ess_fraction}};

  j["noise"] = {{"stddev", {cfg.noise.stddev(0), cfg.noise.stddev(1), cfg.noise.stddev(2),
                            cfg.noise.stddev(3)}},
                {"bias_z", cfg.noise.bias_z},
                {"bias_yaw", cfg.noise.bias_yaw},
                {"cov_inflation", cfg.noise.cov_inflation},
                {"reported_floor",
                 {cfg.noise.reported_floor(0), cfg.noise.reported_floor(1),
                  cfg.noise.reported_floor(2), cfg.noise.reported_floor(3)}}};

  json feet = json::array();
  for (const Vec3& f : cfg.gait.foot_offsets) feet.push_back({f.x(), f.y(), f.z()});
  j["gait"] = {{"step_length", cfg.gait.step_length},
               {"stance_width", cfg.gait.stance_width},
               {"foot_offsets", feet},
               {"steps_per_support_phase", cfg.gait.steps_per_support_phase}};

  json wps = json::array();
  for (const Eigen::Vector2d& wp : cfg.waypoints) wps.push_back({wp.x(), wp.y()});
  j["waypoints"] = wps;
  j["loops"] = cfg.loops;

  j["wall_x"] = cfg.wall_x;
  j["wall_y"] = cfg.wall_y;
  j["initial_offset"] = {cfg.initial_offset.x(), cfg.initial_offset.y(),
                         cfg.initial_offset.z()};
  j["probe"] = {{"workspace_reach", cfg.probe.workspace_reach},
                {"probe_lift", cfg.probe.probe_lift},
                {"contact_epsilon", cfg.probe.contact_epsilon}};

  json script = json::array();
  for (const auto& item : cfg.script.items) {
    if (const sim::WalkAction* w = std::get_if<sim::WalkAction>(&item))
      script.push_back({{"action", "walk"},
                        {"direction", {w->direction.x(), w->direction.y()}},
                        {"distance", w->distance}});
    else {
      const sim::ProbeAction& p = std::get<sim::ProbeAction>(item);
      script.push_back({{"action", "probe"},
                        {"foot", foot_name(p.foot)},
                        {"direction", {p.direction.x(), p.direction.y(), p.direction.z()}}});
    }
  }
  j["script"] = script;
  if (cfg.event_log_file) j["event_log_file"] = *cfg.event_log_file;

  return j.dump(2);
}

}  // namespace haploc
