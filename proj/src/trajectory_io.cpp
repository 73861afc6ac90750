#include "comoto/trajectory_io.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "comoto/errors.hpp"
#include "comoto/report.hpp"

namespace comoto {

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Next non-empty line that is not a comment.
  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty() || line.front() == '#') continue;
      return true;
    }
    return false;
  }

  std::string_view expect(std::string_view what) {
    std::string_view line;
    if (!next(line)) throw UsageError("unexpected end of file, expected " + std::string(what));
    return line;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view header_value(std::string_view line, std::string_view key) {
  const std::string prefix = std::string(key) + ":";
  if (line.substr(0, prefix.size()) != prefix) {
    throw UsageError("expected '" + prefix + "' header, got '" + std::string(line) + "'");
  }
  std::string_view v = line.substr(prefix.size());
  while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
  return v;
}

double to_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw UsageError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

std::size_t to_size(std::string_view s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw UsageError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::string vec_text(const Vec3& v) {
  return "[" + format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z()) + "]";
}

std::string vec_text(const JointConfig& q) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(q[i]);
  }
  return s + "]";
}

Vec3 node_vec3(const YAML::Node& n, const char* what) {
  if (!n || !n.IsSequence() || n.size() != 3) throw UsageError(std::string(what) + " must be [x, y, z]");
  return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

JointConfig node_config(const YAML::Node& n, const char* what) {
  if (!n || !n.IsSequence()) throw UsageError(std::string(what) + " must be a list");
  JointConfig q(static_cast<Eigen::Index>(n.size()));
  for (std::size_t i = 0; i < n.size(); ++i) q[static_cast<Eigen::Index>(i)] = n[i].as<double>();
  return q;
}

ArmPoints node_arm(const YAML::Node& n, const char* what) {
  ArmPoints a{};
  for (std::size_t i = 0; i < kRightArmJointCount; ++i) {
    a[i] = node_vec3(n[std::string(joint_name(kRightArmJoints[i]))], what);
  }
  return a;
}

void arm_text(std::ostringstream& out, const char* key, const ArmPoints& arm) {
  out << "  " << key << ":\n";
  for (std::size_t i = 0; i < kRightArmJointCount; ++i) {
    out << "    " << joint_name(kRightArmJoints[i]) << ": " << vec_text(arm[i]) << "\n";
  }
}

}  // namespace

std::string joint_trajectory_to_text(const JointTrajectory& traj) {
  std::ostringstream out;
  out << "# comoto joint trajectory\n";
  out << "dt: " << format_double(traj.dt) << "\n";
  out << "t0: " << format_double(traj.t0) << "\n";
  out << "dof: " << traj.dof() << "\n";
  out << "waypoint,time";
  for (std::size_t j = 0; j < traj.dof(); ++j) out << ",q" << j;
  out << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << k << ',' << format_double(traj.time_at(k));
    for (Eigen::Index j = 0; j < traj.waypoints[k].size(); ++j) {
      out << ',' << format_double(traj.waypoints[k][j]);
    }
    out << "\n";
  }
  return out.str();
}

JointTrajectory parse_joint_trajectory(std::string_view text) {
  LineReader in(text);
  JointTrajectory traj;
  traj.dt = to_double(header_value(in.expect("dt"), "dt"));
  traj.t0 = to_double(header_value(in.expect("t0"), "t0"));
  const std::size_t dof = to_size(header_value(in.expect("dof"), "dof"));
  const auto columns = split(in.expect("column header"), ',');
  if (columns.size() != dof + 2 || columns[0] != "waypoint" || columns[1] != "time") {
    throw UsageError("joint trajectory column header does not match dof " + std::to_string(dof));
  }
  std::string_view line;
  while (in.next(line)) {
    const auto fields = split(line, ',');
    if (fields.size() != dof + 2) throw UsageError("joint trajectory row has the wrong field count");
    if (to_size(fields[0]) != traj.size()) throw UsageError("joint trajectory rows out of order");
    JointConfig q(static_cast<Eigen::Index>(dof));
    for (std::size_t j = 0; j < dof; ++j) q[static_cast<Eigen::Index>(j)] = to_double(fields[j + 2]);
    traj.waypoints.push_back(std::move(q));
  }
  traj.validate();
  return traj;
}

void save_joint_trajectory(const std::filesystem::path& path, const JointTrajectory& traj) {
  write_text_file(path, joint_trajectory_to_text(traj));
}

JointTrajectory load_joint_trajectory(const std::filesystem::path& path) {
  return parse_joint_trajectory(read_text_file(path));
}

std::string human_trajectory_to_text(const HumanTrajectory& traj) {
  std::ostringstream out;
  out << "# comoto human trajectory\n";
  out << "rate: " << format_double(traj.rate) << "\n";
  out << "joints:";
  for (HumanJoint j : kAllHumanJoints) out << ' ' << joint_name(j);
  out << "\nsamples: " << traj.sample_count() << "\n";
  out << "sample,joint,x,y,z\n";
  for (std::size_t k = 0; k < traj.sample_count(); ++k) {
    for (HumanJoint j : kAllHumanJoints) {
      const Vec3& p = traj.track(j)[k];
      out << k << ',' << joint_name(j) << ',' << format_double(p.x()) << ',' << format_double(p.y())
          << ',' << format_double(p.z()) << "\n";
    }
  }
  return out.str();
}

HumanTrajectory parse_human_trajectory(std::string_view text) {
  LineReader in(text);
  HumanTrajectory traj;
  traj.rate = to_double(header_value(in.expect("rate"), "rate"));
  const auto names = split(header_value(in.expect("joints"), "joints"), ' ');
  if (names.size() != kHumanJointCount) throw UsageError("human trajectory must list all 11 joints");
  for (std::size_t i = 0; i < kHumanJointCount; ++i) {
    if (names[i] != joint_name(kAllHumanJoints[i])) {
      throw UsageError("human trajectory joints must follow the fixed order; got '" +
                       std::string(names[i]) + "' at position " + std::to_string(i));
    }
  }
  const std::size_t count = to_size(header_value(in.expect("samples"), "samples"));
  if (in.expect("column header") != "sample,joint,x,y,z") {
    throw UsageError("human trajectory column header must be sample,joint,x,y,z");
  }
  for (auto& track : traj.samples) track.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    for (HumanJoint j : kAllHumanJoints) {
      const auto fields = split(in.expect("sample row"), ',');
      if (fields.size() != 5 || to_size(fields[0]) != k || fields[1] != joint_name(j)) {
        throw UsageError("human trajectory row out of order at sample " + std::to_string(k));
      }
      traj.samples[index_of(j)].emplace_back(to_double(fields[2]), to_double(fields[3]),
                                             to_double(fields[4]));
    }
  }
  std::string_view extra;
  if (in.next(extra)) throw UsageError("human trajectory has more rows than its header declares");
  traj.validate();
  return traj;
}

void save_human_trajectory(const std::filesystem::path& path, const HumanTrajectory& traj) {
  write_text_file(path, human_trajectory_to_text(traj));
}

HumanTrajectory load_human_trajectory(const std::filesystem::path& path) {
  return parse_human_trajectory(read_text_file(path));
}

std::string scenario_to_yaml(const Scenario& s) {
  std::ostringstream out;
  out << "# comoto scenario. Units: meters, radians, seconds.\n";
  out << "family: " << family_name(s.family) << "\n";
  out << "seed: " << s.seed << "\n";
  out << "chain: " << s.chain.name << "\n";
  out << "robot_start: " << vec_text(s.robot_start) << "\n";
  out << "robot_goal: " << vec_text(s.robot_goal) << "\n";
  out << "robot_object: " << vec_text(s.robot_object) << "\n";
  out << "human_object: " << vec_text(s.human_object) << "\n";
  out << "human_script:\n";
  arm_text(out, "arm_start", s.human_script.arm_start);
  arm_text(out, "arm_goal", s.human_script.arm_goal);
  out << "  move_duration: " << format_double(s.human_script.move_duration) << "\n";
  out << "  total_duration: " << format_double(s.human_script.total_duration) << "\n";
  out << "  noise_scale: " << format_double(s.human_script.noise_scale) << "\n";
  out << "  seed: " << s.human_script.seed << "\n";
  out << "obstacles:";
  if (s.obstacles.empty()) out << " []";
  out << "\n";
  for (const Sphere& o : s.obstacles) {
    out << "  - {center: " << vec_text(o.center) << ", radius: " << format_double(o.radius) << "}\n";
  }
  return out.str();
}

Scenario parse_scenario(std::string_view yaml, const ChainSpec& chain) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("scenario file: ") + e.what());
  }
  try {
    Scenario s;
    s.family = parse_family(root["family"].as<std::string>());
    s.seed = root["seed"].as<std::uint64_t>();
    s.chain = chain;
    if (root["chain"] && root["chain"].as<std::string>() != chain.name) {
      throw UsageError("scenario was generated for chain '" + root["chain"].as<std::string>() +
                       "' but chain '" + chain.name + "' is loaded");
    }
    s.robot_start = node_config(root["robot_start"], "robot_start");
    s.robot_goal = node_config(root["robot_goal"], "robot_goal");
    if (static_cast<std::size_t>(s.robot_start.size()) != chain.dof() ||
        static_cast<std::size_t>(s.robot_goal.size()) != chain.dof()) {
      throw UsageError("scenario configurations do not match the chain dof");
    }
    s.robot_object = node_vec3(root["robot_object"], "robot_object");
    s.human_object = node_vec3(root["human_object"], "human_object");
    const YAML::Node h = root["human_script"];
    s.human_script.arm_start = node_arm(h["arm_start"], "arm_start");
    s.human_script.arm_goal = node_arm(h["arm_goal"], "arm_goal");
    s.human_script.move_duration = h["move_duration"].as<double>();
    s.human_script.total_duration = h["total_duration"].as<double>();
    s.human_script.noise_scale = h["noise_scale"].as<double>();
    s.human_script.seed = h["seed"].as<std::uint64_t>();
    for (const auto& o : root["obstacles"]) {
      s.obstacles.push_back({node_vec3(o["center"], "obstacle center"), o["radius"].as<double>()});
    }
    s.human_script.validate();
    return s;
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("scenario file: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path, const ChainSpec& chain) {
  return parse_scenario(read_text_file(path), chain);
}

}  // namespace comoto
