#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "comoto/baselines.hpp"
#include "comoto/human_motion.hpp"
#include "comoto/kinematics.hpp"

namespace comoto {

enum class ScenarioFamily { kStationary, kReachingFar, kReachingNear };

inline constexpr std::array<ScenarioFamily, 3> kAllFamilies = {
    ScenarioFamily::kStationary, ScenarioFamily::kReachingFar, ScenarioFamily::kReachingNear};

/// "stationary", "reaching_far", "reaching_near".
std::string_view family_name(ScenarioFamily family);
/// Throws UsageError for unknown names.
ScenarioFamily parse_family(std::string_view name);

/// Workspace layout used by the generator. The robot base sits at the origin on
/// the table top (z = 0), the human stands across the table on +x and faces -x.
/// All values are meters or seconds.
struct ScenarioGeometry {
  double table_depth = 0.8;
  double human_standoff = 0.25;  // shoulder behind the far table edge
  double shoulder_height = 0.45;
  double human_x_jitter = 0.05;
  double human_y_range = 0.15;

  Vec3 robot_start_eef{0.30, -0.50, 0.30};
  double robot_start_jitter = 0.05;
  Vec3 robot_object_far{0.40, 0.45, 0.10};  // stationary and reaching_far
  Vec3 robot_object_near{0.55, 0.15, 0.08};
  double robot_object_jitter = 0.05;

  /// Right-arm rest pose relative to the shoulder: palm; elbow and wrist follow.
  Vec3 rest_palm{-0.25, -0.02, -0.36};
  /// Stationary gaze target relative to the shoulder.
  Vec3 stationary_target{-0.35, -0.10, -0.42};
  Vec3 far_object{0.55, -0.30, 0.05};
  double far_object_jitter = 0.05;
  double near_offset_min = 0.03;
  double near_offset_max = 0.12;
  /// The near object lies within this angle (deg) of +x around the robot object.
  double near_spread_deg = 60.0;

  double move_duration_min = 1.6;
  double move_duration_max = 2.0;
  double noise_scale = 0.004;

  double rate = 100.0;             // Hz
  double observation = 1.0;        // s
  double robot_duration = 2.0;     // s
  std::size_t waypoints = 20;
  double timeout_factor = 3.0;     // speed-adjusted timeout in nominal durations
};

struct Scenario {
  ScenarioFamily family = ScenarioFamily::kStationary;
  std::uint64_t seed = 0;
  ChainSpec chain;
  JointConfig robot_start;
  JointConfig robot_goal;
  Vec3 robot_object = Vec3::Zero();
  ReachScript human_script;
  Vec3 human_object = Vec3::Zero();
  std::vector<Sphere> obstacles;

  bool operator==(const Scenario& other) const;
};

/// Elbow and wrist placed between shoulder and palm, in right-arm joint order.
ArmPoints arm_pose(const Vec3& shoulder, const Vec3& palm);

/// One scenario per seed; identical seeds give identical scenarios.
std::vector<Scenario> generate_scenarios(ScenarioFamily family,
                                         const std::vector<std::uint64_t>& seeds,
                                         const ScenarioGeometry& geometry = {},
                                         const ChainSpec& chain = default_chain());

}  // namespace comoto
