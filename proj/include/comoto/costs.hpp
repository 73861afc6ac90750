#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "comoto/human_motion.hpp"
#include "comoto/kinematics.hpp"
#include "comoto/types.hpp"

namespace comoto {

enum class CostTerm { kDistance, kVisibility, kLegibility, kNominal, kSmoothness };

inline constexpr std::array<CostTerm, 5> kAllCostTerms = {
    CostTerm::kDistance, CostTerm::kVisibility, CostTerm::kLegibility, CostTerm::kNominal,
    CostTerm::kSmoothness,
};

/// "distance", "visibility", "legibility", "nominal", "smoothness".
std::string_view cost_name(CostTerm term);

struct CostWeights {
  double dist = 0.0;
  double vis = 0.0;
  double legibility = 0.0;
  double nominal = 0.0;
  double smooth = 0.0;

  double operator[](CostTerm term) const;

  /// All >= 0 and at least one > 0.
  void validate() const;
};

/// Default Mahalanobis-squared clamp for the distance cost.
inline constexpr double kDefaultMahalanobisClamp = 1e-4;

/// Everything the costs need besides the trajectory. Immutable once built; the
/// constructor caches inverse covariances and nominal end-effector positions.
class CostContext {
 public:
  /// `prediction` must already sit on the trajectory waypoint grid (horizon == N).
  /// The legibility weighting defaults to f(k) = (N - 1) - k.
  CostContext(ChainSpec chain, PredictedHumanTrajectory prediction, JointTrajectory nominal,
              Vec3 object, JointConfig goal_config,
              double eps_m = kDefaultMahalanobisClamp, double sigma_floor = 0.01);

  CostContext with_legibility_weights(std::vector<double> weights) const;
  CostContext with_prediction(PredictedHumanTrajectory prediction) const;
  /// Huber width (m) applied to each end-effector deviation in the nominal term.
  /// 0, the default, is the exact unsquared distance.
  CostContext with_nominal_smoothing(double width) const;

  const ChainSpec& chain() const { return chain_; }
  const PredictedHumanTrajectory& prediction() const { return prediction_; }
  const JointTrajectory& nominal() const { return nominal_; }
  const Vec3& object() const { return object_; }
  const JointConfig& goal_config() const { return goal_config_; }
  const Vec3& goal_eef() const { return goal_eef_; }
  const std::vector<double>& legibility_weights() const { return legibility_weights_; }
  double eps_m() const { return eps_m_; }
  double sigma_floor() const { return sigma_floor_; }
  double nominal_smoothing() const { return nominal_smoothing_; }
  std::size_t horizon() const { return prediction_.horizon; }
  const std::vector<Vec3>& nominal_eef() const { return nominal_eef_; }

  /// Predicted joints that enter the distance cost, in skeleton order.
  const std::vector<HumanJoint>& human_joints() const { return human_joints_; }
  const Mat3& inverse_covariance(HumanJoint j, std::size_t k) const {
    return cov_inverse_[index_of(j)][k];
  }

  /// Throws ContractViolation unless `traj` matches the horizon and chain.
  void check_aligned(const JointTrajectory& traj) const;

 private:
  void rebuild_caches();

  ChainSpec chain_;
  PredictedHumanTrajectory prediction_;
  JointTrajectory nominal_;
  Vec3 object_;
  JointConfig goal_config_;
  double eps_m_;
  double sigma_floor_;
  double nominal_smoothing_ = 0.0;
  std::vector<double> legibility_weights_;

  Vec3 goal_eef_ = Vec3::Zero();
  std::vector<Vec3> nominal_eef_;
  std::vector<HumanJoint> human_joints_;
  std::array<std::vector<Mat3>, kHumanJointCount> cov_inverse_;
};

/// Linear f(k) = (count - 1) - k.
std::vector<double> decaying_weights(std::size_t count);

// Scalar building blocks -----------------------------------------------------

/// 1 / max(d^T cov^-1 d, eps_m).
double inverse_mahalanobis_term(const Vec3& d, const Mat3& cov, double eps_m);

/// Angle at `vertex` between the rays to `a` and `b`, radians in [0, pi].
/// Returns 0 when either ray has length below 1e-9.
double vertex_angle(const Vec3& a, const Vec3& vertex, const Vec3& b);

/// sqrt(trace(cov) / 3) floored at sigma_floor.
double scalar_sigma(const Mat3& cov, double sigma_floor);

/// exp(-prefix - remaining) / exp(-full), evaluated as one exponential.
double goal_probability(double prefix_length, double remaining_straightline,
                        double full_straightline);

// Costs ------------------------------------------------------------------------

double cost_distance(const JointTrajectory& traj, const CostContext& ctx);
double cost_visibility(const JointTrajectory& traj, const CostContext& ctx);
double path_length(const JointTrajectory& traj, const ChainSpec& chain);
/// Negative weighted legibility score; minimizing it maximizes legibility.
double cost_legibility(const JointTrajectory& traj, const CostContext& ctx);
/// Legibility score in (0, 1] (the negated cost).
double legibility_score(const JointTrajectory& traj, const CostContext& ctx);
double cost_nominal(const JointTrajectory& traj, const CostContext& ctx);
double cost_smoothness(const JointTrajectory& traj);

/// Value plus gradient with respect to every waypoint (dof x N, column k = d/dq_k).
struct CostValue {
  double value = 0.0;
  Eigen::MatrixXd gradient;
  std::vector<std::string> diagnostics;
};

/// Forward kinematics of every waypoint, shared between cost evaluations.
struct TrajectoryKinematics {
  std::vector<KinematicState> states;

  TrajectoryKinematics(const ChainSpec& chain, const JointTrajectory& traj);
};

CostValue evaluate_cost(CostTerm term, const JointTrajectory& traj, const CostContext& ctx);
CostValue evaluate_cost(CostTerm term, const JointTrajectory& traj, const CostContext& ctx,
                        const TrajectoryKinematics& kin);

/// Scalar value of one term.
double cost_value(CostTerm term, const JointTrajectory& traj, const CostContext& ctx);

struct CostReport {
  double total = 0.0;
  std::map<std::string, double> per_cost;
  /// Gradient over the free variables: interior waypoints 1..N-2, flattened
  /// waypoint-major (dof entries per waypoint).
  Eigen::VectorXd gradient;
  std::vector<std::string> diagnostics;
};

/// Weighted sum of all five costs with the analytic gradient.
CostReport objective(const JointTrajectory& traj, const CostContext& ctx, const CostWeights& w);

/// Same total and breakdown, gradient from central differences with step h.
CostReport objective_fd(const JointTrajectory& traj, const CostContext& ctx, const CostWeights& w,
                        double h = 1e-6);

// Free-variable layout helpers shared with the optimizer.
Eigen::VectorXd interior_gradient(const Eigen::MatrixXd& full_gradient);
Eigen::VectorXd pack_interior(const JointTrajectory& traj);
void unpack_interior(const Eigen::VectorXd& x, JointTrajectory& traj);

}  // namespace comoto
