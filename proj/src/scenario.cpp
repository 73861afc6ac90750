#include "comoto/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "comoto/errors.hpp"

namespace comoto {

namespace {

Vec3 jitter(std::mt19937_64& rng, double amount) {
  std::uniform_real_distribution<double> u(-amount, amount);
  const double x = u(rng);
  const double y = u(rng);
  const double z = u(rng);
  return {x, y, z};
}

Vec3 planar_jitter(std::mt19937_64& rng, double amount) {
  Vec3 v = jitter(rng, amount);
  v.z() = 0.0;
  return v;
}

JointConfig ik_seed(const ChainSpec& chain) {
  JointConfig q = JointConfig::Zero(static_cast<Eigen::Index>(chain.dof()));
  // Elbow-up, wrist-down posture for the shipped 7-DOF chain.
  if (chain.dof() == 7) q << 0.0, 0.7, 0.0, -1.5, 0.0, 0.9, 0.0;
  return chain.clamp(q);
}

}  // namespace

std::string_view family_name(ScenarioFamily family) {
  switch (family) {
    case ScenarioFamily::kStationary: return "stationary";
    case ScenarioFamily::kReachingFar: return "reaching_far";
    case ScenarioFamily::kReachingNear: return "reaching_near";
  }
  return "unknown";
}

ScenarioFamily parse_family(std::string_view name) {
  for (ScenarioFamily f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw UsageError("unknown scenario family '" + std::string(name) +
                   "' (expected stationary, reaching_far or reaching_near)");
}

bool Scenario::operator==(const Scenario& other) const {
  if (family != other.family || seed != other.seed) return false;
  if (robot_start != other.robot_start || robot_goal != other.robot_goal) return false;
  if (robot_object != other.robot_object || human_object != other.human_object) return false;
  const auto& a = human_script;
  const auto& b = other.human_script;
  if (a.arm_start != b.arm_start || a.arm_goal != b.arm_goal || a.seed != b.seed ||
      a.move_duration != b.move_duration || a.total_duration != b.total_duration ||
      a.noise_scale != b.noise_scale) {
    return false;
  }
  if (obstacles.size() != other.obstacles.size()) return false;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (obstacles[i].center != other.obstacles[i].center ||
        obstacles[i].radius != other.obstacles[i].radius) {
      return false;
    }
  }
  return chain.name == other.chain.name && chain.links.size() == other.chain.links.size();
}

ArmPoints arm_pose(const Vec3& shoulder, const Vec3& palm) {
  const Vec3 back = (shoulder - palm).normalized();
  const Vec3 wrist = palm + 0.08 * back;
  const Vec3 elbow = shoulder + 0.5 * (wrist - shoulder) + Vec3(0.0, 0.0, -0.10);
  return {shoulder, elbow, wrist, palm};
}

std::vector<Scenario> generate_scenarios(ScenarioFamily family,
                                         const std::vector<std::uint64_t>& seeds,
                                         const ScenarioGeometry& g, const ChainSpec& chain) {
  chain.validate();
  std::vector<Scenario> out;
  out.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(family) * 7919ULL + 17ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Scenario s;
    s.family = family;
    s.seed = seed;
    s.chain = chain;

    const Vec3 shoulder(g.table_depth + g.human_standoff + (2.0 * unit(rng) - 1.0) * g.human_x_jitter,
                        (2.0 * unit(rng) - 1.0) * g.human_y_range, g.shoulder_height);
    const Vec3 rest_palm = shoulder + g.rest_palm;

    const Vec3 start_eef = g.robot_start_eef + jitter(rng, g.robot_start_jitter);
    const bool near = family == ScenarioFamily::kReachingNear;
    s.robot_object = (near ? g.robot_object_near : g.robot_object_far) +
                     planar_jitter(rng, g.robot_object_jitter);

    switch (family) {
      case ScenarioFamily::kStationary:
        s.human_object = shoulder + g.stationary_target;
        break;
      case ScenarioFamily::kReachingFar:
        s.human_object = g.far_object + planar_jitter(rng, g.far_object_jitter);
        break;
      case ScenarioFamily::kReachingNear: {
        const double spread = g.near_spread_deg * std::numbers::pi / 180.0;
        const double angle = (2.0 * unit(rng) - 1.0) * spread;
        const double radius = g.near_offset_min + (g.near_offset_max - g.near_offset_min) * unit(rng);
        s.human_object = s.robot_object + radius * Vec3(std::cos(angle), std::sin(angle), 0.0);
        break;
      }
    }

    ReachScript& script = s.human_script;
    script.arm_start = arm_pose(shoulder, rest_palm);
    script.arm_goal = family == ScenarioFamily::kStationary ? script.arm_start
                                                            : arm_pose(shoulder, s.human_object);
    script.move_duration =
        g.move_duration_min + (g.move_duration_max - g.move_duration_min) * unit(rng);
    script.total_duration = g.observation + g.timeout_factor * g.robot_duration + 0.1;
    script.noise_scale = g.noise_scale;
    script.seed = seed * 31ULL + static_cast<std::uint64_t>(family) + 1ULL;

    const JointConfig seed_q = ik_seed(chain);
    s.robot_start = solve_position_ik(chain, start_eef, seed_q);
    s.robot_goal = solve_position_ik(chain, s.robot_object, s.robot_start);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace comoto
