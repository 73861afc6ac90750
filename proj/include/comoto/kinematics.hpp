#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "comoto/types.hpp"

namespace comoto {

/// One standard DH row. Link i maps frame i-1 to frame i as
///   Rz(theta_offset + q_i) * Tz(d) * Tx(a) * Rx(alpha)
struct DhRow {
  double a = 0.0;      // m
  double alpha = 0.0;  // rad
  double d = 0.0;      // m
  double theta_offset = 0.0;  // rad
};

struct JointLimit {
  double lo = 0.0;
  double hi = 0.0;
};

/// Revolute serial chain described by standard DH rows.
struct ChainSpec {
  std::string name;
  std::vector<DhRow> links;
  Eigen::Isometry3d base_pose = Eigen::Isometry3d::Identity();
  std::vector<JointLimit> joint_limits;

  std::size_t dof() const { return links.size(); }

  /// Number of points returned by fk_points: every frame origin plus the end effector.
  std::size_t point_count() const { return links.size() + 1; }

  /// Throws ContractViolation unless the chain has >= 2 links, lo < hi for every
  /// joint and an orthonormal base rotation.
  void validate() const;

  JointConfig clamp(const JointConfig& q) const;
  bool within_limits(const JointConfig& q) const;
  JointConfig mid_config() const;
};

/// Planar chain with unit-free link lengths, all joints about world z. Used by tests
/// and small examples.
ChainSpec planar_chain(const std::vector<double>& link_lengths);

/// The shipped 7-DOF chain (same values as config/iiwa_r820.yaml).
ChainSpec default_chain();

/// Time-parameterized joint waypoints. Waypoint k sits at t0 + k * dt.
struct JointTrajectory {
  std::vector<JointConfig> waypoints;
  double dt = 0.1;
  double t0 = 0.0;

  std::size_t size() const { return waypoints.size(); }
  std::size_t dof() const { return waypoints.empty() ? 0 : waypoints.front().size(); }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double duration() const { return waypoints.empty() ? 0.0 : static_cast<double>(size() - 1) * dt; }

  /// N >= 3, dt > 0, equal dimensions.
  void validate() const;

  /// Configuration at path parameter u in [0, N-1], linear between waypoints.
  JointConfig at_parameter(double u) const;

  bool operator==(const JointTrajectory& other) const;
};

/// World-frame origins and rotation axes of every frame for one configuration.
/// axes[j] is the z axis of frame j, about which joint j (0-based) rotates.
struct KinematicState {
  std::vector<Vec3> points;  // size dof + 1, last is the end effector
  std::vector<Vec3> axes;    // size dof

  /// d points[index] / dq, 3 x dof.
  Eigen::Matrix3Xd jacobian(std::size_t index) const;

  /// J^T v for the selected point without forming J.
  Eigen::VectorXd jacobian_transpose_times(std::size_t index, const Vec3& v) const;
};

KinematicState forward(const ChainSpec& chain, const JointConfig& q);

std::vector<Vec3> fk_points(const ChainSpec& chain, const JointConfig& q);
Vec3 fk_eef(const ChainSpec& chain, const JointConfig& q);
Eigen::Matrix3Xd position_jacobian(const ChainSpec& chain, const JointConfig& q,
                                   std::size_t point_index);

/// Damped least-squares position IK for the end effector, clamped to joint limits.
/// Only used for scenario authoring; returns the best configuration found.
JointConfig solve_position_ik(const ChainSpec& chain, const Vec3& target,
                              const JointConfig& seed, int max_iters = 300,
                              double tolerance = 1e-6);

}  // namespace comoto
