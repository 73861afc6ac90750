#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "comoto/types.hpp"

namespace comoto {

enum class HumanJoint : std::uint8_t {
  kRightShoulder,
  kRightElbow,
  kRightWrist,
  kRightPalm,
  kNeck,
  kHead,
  kTorso,
  kLeftShoulder,
  kLeftElbow,
  kLeftWrist,
  kLeftPalm,
};

inline constexpr std::size_t kHumanJointCount = 11;
inline constexpr std::size_t kRightArmJointCount = 4;

inline constexpr std::array<HumanJoint, kHumanJointCount> kAllHumanJoints = {
    HumanJoint::kRightShoulder, HumanJoint::kRightElbow,   HumanJoint::kRightWrist,
    HumanJoint::kRightPalm,     HumanJoint::kNeck,         HumanJoint::kHead,
    HumanJoint::kTorso,         HumanJoint::kLeftShoulder, HumanJoint::kLeftElbow,
    HumanJoint::kLeftWrist,     HumanJoint::kLeftPalm,
};

inline constexpr std::array<HumanJoint, kRightArmJointCount> kRightArmJoints = {
    HumanJoint::kRightShoulder, HumanJoint::kRightElbow, HumanJoint::kRightWrist,
    HumanJoint::kRightPalm,
};

constexpr std::size_t index_of(HumanJoint j) { return static_cast<std::size_t>(j); }
constexpr bool is_right_arm(HumanJoint j) { return index_of(j) < kRightArmJointCount; }

std::string_view joint_name(HumanJoint j);
std::optional<HumanJoint> joint_from_name(std::string_view name);

using ArmPoints = std::array<Vec3, kRightArmJointCount>;

/// World-frame offsets of the non-arm joints relative to the right shoulder.
/// Entries for the right-arm joints are ignored.
struct SkeletonOffsets {
  std::array<Vec3, kHumanJointCount> offsets{};

  const Vec3& operator[](HumanJoint j) const { return offsets[index_of(j)]; }
  Vec3& operator[](HumanJoint j) { return offsets[index_of(j)]; }

  static SkeletonOffsets defaults();
  static SkeletonOffsets zero();
};

/// Ground-truth keypoint tracks sampled at a fixed rate; sample k is at k / rate.
struct HumanTrajectory {
  double rate = 100.0;
  std::array<std::vector<Vec3>, kHumanJointCount> samples;

  std::size_t sample_count() const { return samples.front().size(); }
  double duration() const;
  const std::vector<Vec3>& track(HumanJoint j) const { return samples[index_of(j)]; }

  /// Linear interpolation in time; held constant outside the sampled span.
  Vec3 position(HumanJoint j, double t) const;
  std::array<Vec3, kHumanJointCount> pose_at(double t) const;

  HumanTrajectory prefix(std::size_t count) const;

  /// rate > 0, at least one sample, equal track lengths.
  void validate() const;

  bool operator==(const HumanTrajectory&) const = default;
};

/// Script for one synthetic reach of the right arm.
struct ReachScript {
  ArmPoints arm_start{};
  ArmPoints arm_goal{};
  double move_duration = 1.5;   // s
  double total_duration = 3.0;  // s
  double noise_scale = 0.0;     // m
  std::uint64_t seed = 0;

  void validate() const;
};

/// Quintic minimum-jerk displacement fraction 10t^3 - 15t^4 + 6t^5 for tau in [0, 1].
double min_jerk_fraction(double tau);

HumanTrajectory generate_reach(const ReachScript& script, double rate,
                               const SkeletonOffsets& offsets = SkeletonOffsets::defaults());

struct GaussianPoint {
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Identity();

  bool operator==(const GaussianPoint&) const = default;
};

/// Gaussian tube: per joint and horizon step k a mean and covariance at time
/// t_start + k * step. Joints that were not predicted have empty tracks.
struct PredictedHumanTrajectory {
  double t_start = 0.0;
  double step = 0.01;
  std::size_t horizon = 0;
  std::array<std::vector<GaussianPoint>, kHumanJointCount> tracks;

  bool has(HumanJoint j) const { return tracks[index_of(j)].size() == horizon && horizon > 0; }
  const GaussianPoint& at(HumanJoint j, std::size_t k) const { return tracks[index_of(j)][k]; }
  double time_at(std::size_t k) const { return t_start + static_cast<double>(k) * step; }

  /// horizon >= 1, populated tracks have `horizon` entries, and every covariance is
  /// symmetric (1e-12) with smallest eigenvalue >= sigma_floor^2 (minus rounding).
  void validate(double sigma_floor) const;

  bool operator==(const PredictedHumanTrajectory&) const = default;
};

struct PredictorOptions {
  double observation_window = 1.0;  // s of data required before predicting
  double velocity_window = 0.1;     // s used for the finite-difference velocity
  double sigma0 = 0.02;             // m
  double kappa = 0.08;              // m/s
  double sigma_floor = 0.01;        // m
  /// Goal hypothesis for the right-arm joints; pure constant velocity when absent.
  std::optional<ArmPoints> goal;
};

/// Isotropic variance sigma0^2 + (kappa t)^2, floored at sigma_floor^2.
double predicted_variance(double t_ahead, const PredictorOptions& options);

/// Predicts the right-arm joints from an observed prefix. Step k of the result is
/// k * step seconds after the last observed sample.
PredictedHumanTrajectory predict(const HumanTrajectory& observed, std::size_t horizon,
                                 double step, const PredictorOptions& options = {});

/// Fills neck/head/torso/left arm from the right-shoulder track using fixed offsets;
/// their covariances copy the shoulder's.
PredictedHumanTrajectory extrapolate_skeleton(const PredictedHumanTrajectory& arm_prediction,
                                              const SkeletonOffsets& offsets);

/// Linear interpolation of means and covariances onto t0 + k * dt, k < count.
/// Times outside the predicted span hold the nearest end.
PredictedHumanTrajectory resample(const PredictedHumanTrajectory& prediction, double t0,
                                  std::size_t count, double dt);

/// Multiplies every covariance by `factor`.
PredictedHumanTrajectory scale_covariances(const PredictedHumanTrajectory& prediction,
                                           double factor);

/// Same means, identity covariance everywhere.
PredictedHumanTrajectory with_identity_covariance(const PredictedHumanTrajectory& prediction);

}  // namespace comoto
