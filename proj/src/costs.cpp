#include "comoto/costs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "comoto/errors.hpp"

namespace comoto {

namespace {

constexpr double kTinyLength = 1e-12;
constexpr double kDegenerateRay = 1e-9;

Eigen::MatrixXd zero_gradient(const JointTrajectory& traj) {
  return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(traj.dof()),
                               static_cast<Eigen::Index>(traj.size()));
}

Vec3 unit_or_zero(const Vec3& v) {
  const double n = v.norm();
  return n < kTinyLength ? Vec3::Zero() : Vec3(v / n);
}

CostValue distance_cost(const JointTrajectory& traj, const CostContext& ctx,
                        const TrajectoryKinematics& kin) {
  CostValue out{0.0, zero_gradient(traj), {}};
  const double eps = ctx.eps_m();
  const auto& pred = ctx.prediction();
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const KinematicState& state = kin.states[t];
    for (std::size_t j = 0; j < state.points.size(); ++j) {
      const Vec3& p = state.points[j];
      Vec3 grad_p = Vec3::Zero();
      for (HumanJoint hj : ctx.human_joints()) {
        const Vec3 d = pred.at(hj, t).mean - p;
        const Mat3& inv = ctx.inverse_covariance(hj, t);
        const Vec3 inv_d = inv * d;
        const double m = d.dot(inv_d);
        if (m > eps) {
          out.value += 1.0 / m;
          grad_p += (2.0 / (m * m)) * inv_d;
        } else {
          out.value += 1.0 / eps;  // clamped; zero subgradient
        }
      }
      if (j > 0) out.gradient.col(static_cast<Eigen::Index>(t)) +=
          state.jacobian_transpose_times(j, grad_p);
    }
  }
  return out;
}

CostValue visibility_cost(const JointTrajectory& traj, const CostContext& ctx,
                          const TrajectoryKinematics& kin) {
  const auto& pred = ctx.prediction();
  require(pred.has(HumanJoint::kHead), "visibility cost needs a predicted head track");
  CostValue out{0.0, zero_gradient(traj), {}};
  const std::size_t eef = ctx.chain().dof();
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const GaussianPoint& head = pred.at(HumanJoint::kHead, t);
    const Vec3& p = kin.states[t].points[eef];
    const Vec3 a = ctx.object() - head.mean;
    const Vec3 b = p - head.mean;
    const double na = a.norm(), nb = b.norm();
    if (na < kDegenerateRay || nb < kDegenerateRay) {
      out.diagnostics.push_back("visibility: degenerate gaze geometry at step " +
                                std::to_string(t));
      continue;
    }
    const double sigma = scalar_sigma(head.cov, ctx.sigma_floor());
    const double sin_theta = a.cross(b).norm() / (na * nb);
    const double theta = std::atan2(a.cross(b).norm(), a.dot(b));
    out.value += theta / sigma;
    if (sin_theta > kTinyLength) {
      const Vec3 ua = a / na, ub = b / nb;
      const Vec3 dtheta_db = (ua.dot(ub) * ub - ua) / (nb * sin_theta);
      out.gradient.col(static_cast<Eigen::Index>(t)) +=
          kin.states[t].jacobian_transpose_times(eef, dtheta_db / sigma);
    }
  }
  return out;
}

CostValue legibility_cost(const JointTrajectory& traj, const CostContext& ctx,
                          const TrajectoryKinematics& kin) {
  const auto& f = ctx.legibility_weights();
  const double f_sum = std::accumulate(f.begin(), f.end(), 0.0);
  require(f_sum > 0.0, "legibility weights sum to zero");

  const std::size_t n = traj.size();
  const std::size_t eef = ctx.chain().dof();
  const Vec3& goal = ctx.goal_eef();
  std::vector<Vec3> p(n);
  for (std::size_t k = 0; k < n; ++k) p[k] = kin.states[k].points[eef];

  std::vector<Vec3> seg_dir(n - 1);
  std::vector<double> prefix(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vec3 seg = p[k + 1] - p[k];
    seg_dir[k] = unit_or_zero(seg);
    prefix[k + 1] = prefix[k] + seg.norm();
  }
  const double full = (goal - p[0]).norm();

  // weight[t] = f_t P_t / sum(f)
  std::vector<double> weight(n);
  double score = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double prob = goal_probability(prefix[t], (goal - p[t]).norm(), full);
    weight[t] = f[t] * prob / f_sum;
    score += weight[t];
  }

  CostValue out{-score, zero_gradient(traj), {}};
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t t = n; t-- > 0;) suffix[t] = suffix[t + 1] + weight[t];

  for (std::size_t k = 0; k < n; ++k) {
    Vec3 grad_p = weight[k] * unit_or_zero(p[k] - goal);
    if (k >= 1) grad_p += suffix[k] * seg_dir[k - 1];
    if (k + 1 < n) grad_p -= suffix[k + 1] * seg_dir[k];
    if (k == 0) grad_p -= suffix[0] * unit_or_zero(p[0] - goal);
    out.gradient.col(static_cast<Eigen::Index>(k)) +=
        kin.states[k].jacobian_transpose_times(eef, grad_p);
  }
  return out;
}

CostValue nominal_cost(const JointTrajectory& traj, const CostContext& ctx,
                       const TrajectoryKinematics& kin) {
  require(ctx.nominal().size() == traj.size(),
          "nominal has " + std::to_string(ctx.nominal().size()) + " waypoints, trajectory has " +
              std::to_string(traj.size()));
  CostValue out{0.0, zero_gradient(traj), {}};
  const std::size_t eef = ctx.chain().dof();
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const Vec3 diff = kin.states[t].points[eef] - ctx.nominal_eef()[t];
    const double dist = diff.norm();
    const double h = ctx.nominal_smoothing();
    if (dist < h) {
      out.value += 0.5 * dist * dist / h;
      out.gradient.col(static_cast<Eigen::Index>(t)) +=
          kin.states[t].jacobian_transpose_times(eef, diff / h);
    } else {
      out.value += dist - 0.5 * h;
      out.gradient.col(static_cast<Eigen::Index>(t)) +=
          kin.states[t].jacobian_transpose_times(eef, unit_or_zero(diff));
    }
  }
  return out;
}

CostValue smoothness_cost(const JointTrajectory& traj) {
  require(traj.size() >= 3, "smoothness needs at least 3 waypoints");
  CostValue out{0.0, zero_gradient(traj), {}};
  const double inv_dt2 = 1.0 / (traj.dt * traj.dt);
  for (std::size_t t = 0; t + 2 < traj.size(); ++t) {
    const Eigen::VectorXd acc =
        (traj.waypoints[t + 2] - 2.0 * traj.waypoints[t + 1] + traj.waypoints[t]) * inv_dt2;
    out.value += acc.squaredNorm();
    const Eigen::VectorXd g = 2.0 * inv_dt2 * acc;
    const auto c = static_cast<Eigen::Index>(t);
    out.gradient.col(c) += g;
    out.gradient.col(c + 1) -= 2.0 * g;
    out.gradient.col(c + 2) += g;
  }
  return out;
}

}  // namespace

std::string_view cost_name(CostTerm term) {
  switch (term) {
    case CostTerm::kDistance: return "distance";
    case CostTerm::kVisibility: return "visibility";
    case CostTerm::kLegibility: return "legibility";
    case CostTerm::kNominal: return "nominal";
    case CostTerm::kSmoothness: return "smoothness";
  }
  return "unknown";
}

double CostWeights::operator[](CostTerm term) const {
  switch (term) {
    case CostTerm::kDistance: return dist;
    case CostTerm::kVisibility: return vis;
    case CostTerm::kLegibility: return legibility;
    case CostTerm::kNominal: return nominal;
    case CostTerm::kSmoothness: return smooth;
  }
  return 0.0;
}

void CostWeights::validate() const {
  bool any = false;
  for (CostTerm t : kAllCostTerms) {
    const double w = (*this)[t];
    require(w >= 0.0 && std::isfinite(w),
            "cost weight '" + std::string(cost_name(t)) + "' must be finite and >= 0");
    any = any || w > 0.0;
  }
  require(any, "at least one cost weight must be positive");
}

std::vector<double> decaying_weights(std::size_t count) {
  std::vector<double> f(count);
  for (std::size_t k = 0; k < count; ++k) f[k] = static_cast<double>(count - 1 - k);
  return f;
}

CostContext::CostContext(ChainSpec chain, PredictedHumanTrajectory prediction,
                         JointTrajectory nominal, Vec3 object, JointConfig goal_config,
                         double eps_m, double sigma_floor)
    : chain_(std::move(chain)),
      prediction_(std::move(prediction)),
      nominal_(std::move(nominal)),
      object_(std::move(object)),
      goal_config_(std::move(goal_config)),
      eps_m_(eps_m),
      sigma_floor_(sigma_floor),
      legibility_weights_(decaying_weights(prediction_.horizon)) {
  chain_.validate();
  require(eps_m_ > 0.0, "eps_m must be positive");
  require(sigma_floor_ > 0.0, "sigma_floor must be positive");
  require(static_cast<std::size_t>(goal_config_.size()) == chain_.dof(),
          "goal config dimension does not match chain");
  nominal_.validate();
  require(nominal_.dof() == chain_.dof(), "nominal dimension does not match chain");
  rebuild_caches();
}

CostContext CostContext::with_legibility_weights(std::vector<double> weights) const {
  CostContext out = *this;
  out.legibility_weights_ = std::move(weights);
  out.rebuild_caches();
  return out;
}

CostContext CostContext::with_prediction(PredictedHumanTrajectory prediction) const {
  CostContext out = *this;
  out.prediction_ = std::move(prediction);
  out.rebuild_caches();
  return out;
}

CostContext CostContext::with_nominal_smoothing(double width) const {
  require(width >= 0.0 && std::isfinite(width), "nominal smoothing width must be non-negative");
  CostContext out = *this;
  out.nominal_smoothing_ = width;
  return out;
}

void CostContext::rebuild_caches() {
  prediction_.validate(0.0);
  require(legibility_weights_.size() == prediction_.horizon,
          "legibility weights must have one entry per waypoint");
  double f_sum = 0.0;
  for (double f : legibility_weights_) {
    require(f >= 0.0, "legibility weights must be non-negative");
    f_sum += f;
  }
  require(f_sum > 0.0, "legibility weights sum to zero");

  goal_eef_ = fk_eef(chain_, goal_config_);
  nominal_eef_.clear();
  for (const auto& q : nominal_.waypoints) nominal_eef_.push_back(fk_eef(chain_, q));

  human_joints_.clear();
  for (HumanJoint j : kAllHumanJoints) {
    auto& inv = cov_inverse_[index_of(j)];
    inv.clear();
    if (!prediction_.has(j)) continue;
    human_joints_.push_back(j);
    for (std::size_t k = 0; k < prediction_.horizon; ++k) {
      const Eigen::LLT<Mat3> llt(prediction_.at(j, k).cov);
      require(llt.info() == Eigen::Success,
              "prediction covariance for " + std::string(joint_name(j)) + " at step " +
                  std::to_string(k) + " is not invertible");
      inv.push_back(llt.solve(Mat3::Identity()));
    }
  }
}

void CostContext::check_aligned(const JointTrajectory& traj) const {
  traj.validate();
  require(traj.dof() == chain_.dof(), "trajectory dimension does not match chain");
  require(traj.size() == prediction_.horizon,
          "trajectory has " + std::to_string(traj.size()) + " waypoints, prediction horizon is " +
              std::to_string(prediction_.horizon));
}

double inverse_mahalanobis_term(const Vec3& d, const Mat3& cov, double eps_m) {
  const double m = d.dot(cov.llt().solve(d));
  return 1.0 / std::max(m, eps_m);
}

double vertex_angle(const Vec3& a, const Vec3& vertex, const Vec3& b) {
  const Vec3 u = a - vertex, v = b - vertex;
  if (u.norm() < kDegenerateRay || v.norm() < kDegenerateRay) return 0.0;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double scalar_sigma(const Mat3& cov, double sigma_floor) {
  return std::max(std::sqrt(std::max(cov.trace(), 0.0) / 3.0), sigma_floor);
}

double goal_probability(double prefix_length, double remaining_straightline,
                        double full_straightline) {
  require(prefix_length >= 0.0 && remaining_straightline >= 0.0 && full_straightline >= 0.0,
          "goal_probability inputs must be non-negative");
  return std::exp(full_straightline - prefix_length - remaining_straightline);
}

TrajectoryKinematics::TrajectoryKinematics(const ChainSpec& chain, const JointTrajectory& traj) {
  states.reserve(traj.size());
  for (const auto& q : traj.waypoints) states.push_back(forward(chain, q));
}

CostValue evaluate_cost(CostTerm term, const JointTrajectory& traj, const CostContext& ctx,
                        const TrajectoryKinematics& kin) {
  switch (term) {
    case CostTerm::kDistance: return distance_cost(traj, ctx, kin);
    case CostTerm::kVisibility: return visibility_cost(traj, ctx, kin);
    case CostTerm::kLegibility: return legibility_cost(traj, ctx, kin);
    case CostTerm::kNominal: return nominal_cost(traj, ctx, kin);
    case CostTerm::kSmoothness: return smoothness_cost(traj);
  }
  throw ContractViolation("unknown cost term");
}

CostValue evaluate_cost(CostTerm term, const JointTrajectory& traj, const CostContext& ctx) {
  ctx.check_aligned(traj);
  return evaluate_cost(term, traj, ctx, TrajectoryKinematics(ctx.chain(), traj));
}

double cost_value(CostTerm term, const JointTrajectory& traj, const CostContext& ctx) {
  return evaluate_cost(term, traj, ctx).value;
}

double cost_distance(const JointTrajectory& traj, const CostContext& ctx) {
  return cost_value(CostTerm::kDistance, traj, ctx);
}

double cost_visibility(const JointTrajectory& traj, const CostContext& ctx) {
  return cost_value(CostTerm::kVisibility, traj, ctx);
}

double path_length(const JointTrajectory& traj, const ChainSpec& chain) {
  double length = 0.0;
  Vec3 prev;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vec3 p = fk_eef(chain, traj.waypoints[k]);
    if (k > 0) length += (p - prev).norm();
    prev = p;
  }
  return length;
}

double cost_legibility(const JointTrajectory& traj, const CostContext& ctx) {
  return cost_value(CostTerm::kLegibility, traj, ctx);
}

double legibility_score(const JointTrajectory& traj, const CostContext& ctx) {
  return -cost_legibility(traj, ctx);
}

double cost_nominal(const JointTrajectory& traj, const CostContext& ctx) {
  return cost_value(CostTerm::kNominal, traj, ctx);
}

double cost_smoothness(const JointTrajectory& traj) {
  traj.validate();
  return smoothness_cost(traj).value;
}

Eigen::VectorXd interior_gradient(const Eigen::MatrixXd& full_gradient) {
  const Eigen::Index n = full_gradient.cols();
  const Eigen::Index dof = full_gradient.rows();
  Eigen::VectorXd out(dof * std::max<Eigen::Index>(n - 2, 0));
  for (Eigen::Index k = 1; k + 1 < n; ++k) out.segment((k - 1) * dof, dof) = full_gradient.col(k);
  return out;
}

Eigen::VectorXd pack_interior(const JointTrajectory& traj) {
  const auto dof = static_cast<Eigen::Index>(traj.dof());
  const auto n = static_cast<Eigen::Index>(traj.size());
  Eigen::VectorXd x(dof * (n - 2));
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    x.segment((k - 1) * dof, dof) = traj.waypoints[static_cast<std::size_t>(k)];
  }
  return x;
}

void unpack_interior(const Eigen::VectorXd& x, JointTrajectory& traj) {
  const auto dof = static_cast<Eigen::Index>(traj.dof());
  const auto n = static_cast<Eigen::Index>(traj.size());
  require(x.size() == dof * (n - 2), "free-variable vector has the wrong size");
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    traj.waypoints[static_cast<std::size_t>(k)] = x.segment((k - 1) * dof, dof);
  }
}

CostReport objective(const JointTrajectory& traj, const CostContext& ctx, const CostWeights& w) {
  w.validate();
  ctx.check_aligned(traj);
  const TrajectoryKinematics kin(ctx.chain(), traj);
  CostReport report;
  Eigen::MatrixXd grad = zero_gradient(traj);
  for (CostTerm term : kAllCostTerms) {
    CostValue c = evaluate_cost(term, traj, ctx, kin);
    report.per_cost[std::string(cost_name(term))] = c.value;
    const double weight = w[term];
    if (weight != 0.0) {
      report.total += weight * c.value;
      grad += weight * c.gradient;
    }
    for (auto& d : c.diagnostics) report.diagnostics.push_back(std::move(d));
  }
  report.gradient = interior_gradient(grad);
  return report;
}

CostReport objective_fd(const JointTrajectory& traj, const CostContext& ctx, const CostWeights& w,
                        double h) {
  CostReport report = objective(traj, ctx, w);
  Eigen::VectorXd x = pack_interior(traj);
  JointTrajectory probe = traj;
  auto total_at = [&](const Eigen::VectorXd& v) {
    unpack_interior(v, probe);
    const TrajectoryKinematics kin(ctx.chain(), probe);
    double total = 0.0;
    for (CostTerm term : kAllCostTerms) {
      if (w[term] != 0.0) total += w[term] * evaluate_cost(term, probe, ctx, kin).value;
    }
    return total;
  };
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (total_at(xp) - total_at(xm)) / (2.0 * h);
  }
  report.gradient = grad;
  return report;
}

}  // namespace comoto
