#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "comoto/human_motion.hpp"
#include "comoto/kinematics.hpp"
#include "comoto/scenario.hpp"

namespace comoto {

/// Joint trajectory text:
///   # comoto joint trajectory
///   dt: <s>
///   t0: <s>
///   dof: <n>
///   waypoint,time,q0,...,q<n-1>
///   <one row per waypoint>
/// Values are written in shortest round-trip form, so save/load is exact.
std::string joint_trajectory_to_text(const JointTrajectory& traj);
JointTrajectory parse_joint_trajectory(std::string_view text);
void save_joint_trajectory(const std::filesystem::path& path, const JointTrajectory& traj);
JointTrajectory load_joint_trajectory(const std::filesystem::path& path);

/// Human trajectory text:
///   # comoto human trajectory
///   rate: <Hz>
///   joints: <names in the fixed joint order>
///   samples: <n>
///   sample,joint,x,y,z
///   <one row per sample per joint, sample-major, joints in the header order>
std::string human_trajectory_to_text(const HumanTrajectory& traj);
HumanTrajectory parse_human_trajectory(std::string_view text);
void save_human_trajectory(const std::filesystem::path& path, const HumanTrajectory& traj);
HumanTrajectory load_human_trajectory(const std::filesystem::path& path);

/// Scenario YAML. The chain is referenced by name only; `chain` supplies it on load.
std::string scenario_to_yaml(const Scenario& scenario);
Scenario parse_scenario(std::string_view yaml, const ChainSpec& chain);
Scenario load_scenario(const std::filesystem::path& path, const ChainSpec& chain);

}  // namespace comoto
