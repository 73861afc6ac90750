#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "comoto/benchmark.hpp"

namespace comoto {

/// Directory holding the shipped configuration files.
std::filesystem::path default_config_dir();

/// Chain file: name, dh rows [a, alpha, d, theta_offset], base_pose
/// {translation: [x, y, z], rpy: [roll, pitch, yaw]}, joint_limits [lo, hi].
/// Meters and radians.
ChainSpec parse_chain(std::string_view yaml);
ChainSpec load_chain(const std::filesystem::path& path);
std::string chain_to_yaml(const ChainSpec& chain);

/// Skeleton file: joint name -> [x, y, z] offset from the right shoulder, meters.
SkeletonOffsets parse_skeleton(std::string_view yaml);
SkeletonOffsets load_skeleton(const std::filesystem::path& path);

/// Weights file: alpha_dist, alpha_vis, alpha_legibility, alpha_nominal,
/// alpha_smooth, eps_m, sigma_floor, plus optional `baselines` and `nominal`
/// sections. Keys that are absent keep the values already in `config`.
void apply_weights(std::string_view yaml, RunConfig& config);
void load_weights(const std::filesystem::path& path, RunConfig& config);

/// Run file. May reference chain, skeleton and weights files by path, relative to
/// the run file's directory, and overrides any other RunConfig field by section.
RunConfig parse_run_config(std::string_view yaml, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// config/run.yaml from the shipped configuration directory.
RunConfig default_run_config();

}  // namespace comoto
