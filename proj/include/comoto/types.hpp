#pragma once

#include <Eigen/Dense>

namespace comoto {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Joint angles of a serial chain, radians.
using JointConfig = Eigen::VectorXd;

}  // namespace comoto
