#include "comoto/config_io.hpp"

#include <cmath>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "comoto/errors.hpp"
#include "comoto/report.hpp"

namespace comoto {

namespace {

YAML::Node load_yaml(std::string_view text, std::string_view what) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Vec3 as_vec3(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() != 3) throw UsageError(what + " must be a list of 3 numbers");
  return {node[0].as<double>(), node[1].as<double>(), node[2].as<double>()};
}

void read_vec3(const YAML::Node& node, const char* key, Vec3& out) {
  if (!node || !node[key]) return;
  out = as_vec3(node[key], key);
}

void apply_weights_node(const YAML::Node& w, RunConfig& c) {
  read(w, "alpha_dist", c.comoto.dist);
  read(w, "alpha_vis", c.comoto.vis);
  read(w, "alpha_legibility", c.comoto.legibility);
  read(w, "alpha_nominal", c.comoto.nominal);
  read(w, "alpha_smooth", c.comoto.smooth);
  read(w, "eps_m", c.eps_m);
  read(w, "sigma_floor", c.sigma_floor);
  read(w, "nominal_smoothing", c.nominal_smoothing);
  if (const auto b = w["baselines"]) {
    read(b, "legible_smooth", c.baselines.legible_smooth);
    read(b, "distvis_dist", c.baselines.distvis_dist);
    read(b, "distvis_vis", c.baselines.distvis_vis);
    read(b, "distvis_nominal", c.baselines.distvis_nominal);
  }
  if (const auto n = w["nominal"]) {
    read(n, "smooth", c.nominal.smooth);
    read(n, "obstacle", c.nominal.obstacle);
    read(n, "margin", c.nominal.margin);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::filesystem::path default_config_dir() { return COMOTO_CONFIG_DIR; }

namespace {

ChainSpec parse_chain_node(std::string_view yaml) {
  const YAML::Node root = load_yaml(yaml, "chain file");
  ChainSpec chain;
  read(root, "name", chain.name);
  const YAML::Node dh = root["dh"];
  if (!dh || !dh.IsSequence()) throw UsageError("chain file needs a 'dh' list");
  for (const auto& row : dh) {
    if (!row.IsSequence() || row.size() != 4) {
      throw UsageError("each dh row must be [a, alpha, d, theta_offset]");
    }
    chain.links.push_back({row[0].as<double>(), row[1].as<double>(), row[2].as<double>(),
                           row[3].as<double>()});
  }
  const YAML::Node limits = root["joint_limits"];
  if (!limits || !limits.IsSequence()) throw UsageError("chain file needs a 'joint_limits' list");
  for (const auto& row : limits) {
    if (!row.IsSequence() || row.size() != 2) throw UsageError("each joint limit must be [lo, hi]");
    chain.joint_limits.push_back({row[0].as<double>(), row[1].as<double>()});
  }
  if (const YAML::Node base = root["base_pose"]) {
    Vec3 t = Vec3::Zero(), rpy = Vec3::Zero();
    read_vec3(base, "translation", t);
    read_vec3(base, "rpy", rpy);
    chain.base_pose = Eigen::Isometry3d::Identity();
    chain.base_pose.translate(t);
    chain.base_pose.rotate(Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                           Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                           Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()));
  }
  if (chain.joint_limits.size() != chain.links.size()) {
    throw UsageError("chain file has " + std::to_string(chain.links.size()) + " dh rows but " +
                     std::to_string(chain.joint_limits.size()) + " joint limits");
  }
  chain.validate();
  return chain;
}

SkeletonOffsets parse_skeleton_node(std::string_view yaml) {
  const YAML::Node root = load_yaml(yaml, "skeleton file");
  SkeletonOffsets s = SkeletonOffsets::zero();
  const YAML::Node offsets = root["offsets"] ? root["offsets"] : root;
  if (!offsets.IsMap()) throw UsageError("skeleton file must map joint names to offsets");
  for (const auto& kv : offsets) {
    const auto name = kv.first.as<std::string>();
    const auto joint = joint_from_name(name);
    if (!joint) throw UsageError("skeleton file names unknown joint '" + name + "'");
    if (is_right_arm(*joint)) throw UsageError("skeleton offsets cannot set right-arm joint '" + name + "'");
    s[*joint] = as_vec3(kv.second, name);
  }
  return s;
}

}  // namespace

ChainSpec parse_chain(std::string_view yaml) {
  try {
    return parse_chain_node(yaml);
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("chain file: ") + e.what());
  }
}

ChainSpec load_chain(const std::filesystem::path& path) { return parse_chain(read_text_file(path)); }

std::string chain_to_yaml(const ChainSpec& chain) {
  std::ostringstream out;
  out << "# Serial chain, standard DH. Units: meters, radians.\n";
  out << "name: " << chain.name << "\n";
  const Vec3 t = chain.base_pose.translation();
  const Vec3 ypr = chain.base_pose.rotation().eulerAngles(2, 1, 0);
  out << "base_pose:\n  translation: [" << format_double(t.x()) << ", " << format_double(t.y())
      << ", " << format_double(t.z()) << "]\n";
  out << "  rpy: [" << format_double(ypr[2]) << ", " << format_double(ypr[1]) << ", "
      << format_double(ypr[0]) << "]\n";
  out << "# a, alpha, d, theta_offset\ndh:\n";
  for (const DhRow& r : chain.links) {
    out << "  - [" << format_double(r.a) << ", " << format_double(r.alpha) << ", "
        << format_double(r.d) << ", " << format_double(r.theta_offset) << "]\n";
  }
  out << "# lo, hi\njoint_limits:\n";
  for (const JointLimit& l : chain.joint_limits) {
    out << "  - [" << format_double(l.lo) << ", " << format_double(l.hi) << "]\n";
  }
  return out.str();
}

SkeletonOffsets parse_skeleton(std::string_view yaml) {
  try {
    return parse_skeleton_node(yaml);
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("skeleton file: ") + e.what());
  }
}

SkeletonOffsets load_skeleton(const std::filesystem::path& path) {
  return parse_skeleton(read_text_file(path));
}

void apply_weights(std::string_view yaml, RunConfig& config) {
  apply_weights_node(load_yaml(yaml, "weights file"), config);
  config.comoto.validate();
}

void load_weights(const std::filesystem::path& path, RunConfig& config) {
  apply_weights(read_text_file(path), config);
}

RunConfig parse_run_config(std::string_view yaml, const std::filesystem::path& base_dir) {
  const YAML::Node root = load_yaml(yaml, "run config");
  RunConfig c;
  if (root["chain"]) c.chain = load_chain(resolve(base_dir, root["chain"].as<std::string>()));
  if (root["skeleton"]) c.skeleton = load_skeleton(resolve(base_dir, root["skeleton"].as<std::string>()));
  if (root["weights"]) {
    const YAML::Node w = root["weights"];
    if (w.IsScalar()) {
      load_weights(resolve(base_dir, w.as<std::string>()), c);
    } else {
      apply_weights_node(w, c);
    }
  }

  if (const auto o = root["optimizer"]) {
    read(o, "max_iters", c.optimizer.max_iters);
    read(o, "grad_tol", c.optimizer.grad_tol);
    read(o, "step_init", c.optimizer.step_init);
    read(o, "step_shrink", c.optimizer.step_shrink);
    read(o, "step_grow", c.optimizer.step_grow);
    read(o, "fd_check", c.optimizer.fd_check);
    read(o, "seed", c.optimizer.seed);
    read(o, "min_step", c.optimizer.min_step);
    read(o, "memory", c.optimizer.memory);
  }
  if (const auto p = root["predictor"]) {
    read(p, "observation_window", c.predictor.observation_window);
    read(p, "velocity_window", c.predictor.velocity_window);
    read(p, "sigma0", c.predictor.sigma0);
    read(p, "kappa", c.predictor.kappa);
    read(p, "sigma_floor", c.predictor.sigma_floor);
    read(p, "step", c.prediction_step);
  }
  if (const auto s = root["speed_adjust"]) {
    read(s, "d_stop", c.speed.d_stop);
    read(s, "d_slow", c.speed.d_slow);
    read(s, "control_rate", c.speed.control_rate);
    read(s, "timeout_factor", c.geometry.timeout_factor);
  }
  if (const auto t = root["thresholds"]) {
    read(t, "separation", c.thresholds.separation);
    read(t, "fov_deg", c.thresholds.fov_deg);
    read(t, "stop_distance", c.thresholds.stop_distance);
    read(t, "legibility_length_unit", c.thresholds.legibility_length_unit);
  }
  if (const auto g = root["geometry"]) {
    ScenarioGeometry& s = c.geometry;
    read(g, "table_depth", s.table_depth);
    read(g, "human_standoff", s.human_standoff);
    read(g, "shoulder_height", s.shoulder_height);
    read(g, "human_x_jitter", s.human_x_jitter);
    read(g, "human_y_range", s.human_y_range);
    read_vec3(g, "robot_start_eef", s.robot_start_eef);
    read(g, "robot_start_jitter", s.robot_start_jitter);
    read_vec3(g, "robot_object_far", s.robot_object_far);
    read_vec3(g, "robot_object_near", s.robot_object_near);
    read(g, "robot_object_jitter", s.robot_object_jitter);
    read_vec3(g, "rest_palm", s.rest_palm);
    read_vec3(g, "stationary_target", s.stationary_target);
    read_vec3(g, "far_object", s.far_object);
    read(g, "far_object_jitter", s.far_object_jitter);
    read(g, "near_offset_min", s.near_offset_min);
    read(g, "near_offset_max", s.near_offset_max);
    read(g, "near_spread_deg", s.near_spread_deg);
    read(g, "move_duration_min", s.move_duration_min);
    read(g, "move_duration_max", s.move_duration_max);
    read(g, "noise_scale", s.noise_scale);
    read(g, "rate", s.rate);
    read(g, "observation", s.observation);
    read(g, "robot_duration", s.robot_duration);
    read(g, "waypoints", s.waypoints);
  }
  if (const auto f = root["families"]) {
    c.families.clear();
    for (const auto& name : f) c.families.push_back(parse_family(name.as<std::string>()));
  }
  if (const auto s = root["seeds"]) {
    c.seeds.clear();
    for (const auto& v : s) c.seeds.push_back(v.as<std::uint64_t>());
  }
  read(root, "workers", c.workers);
  read(root, "out_dir", c.out_dir);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path());
}

RunConfig default_run_config() { return load_run_config(default_config_dir() / "run.yaml"); }

}  // namespace comoto
