#include "comoto/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include "comoto/errors.hpp"

namespace comoto {

namespace {

constexpr double kArmijo = 1e-4;

bool all_finite(const CostReport& r) {
  return std::isfinite(r.total) && r.gradient.allFinite();
}

// Per-joint acceleration metric on the interior waypoints: A^T A / dt^4 where A is
// the second-difference operator with the endpoints eliminated. Coordinates held
// at a joint limit are removed from the system before solving.
class AccelerationMetric {
 public:
  AccelerationMetric(std::size_t interior, double dt) {
    const auto m = static_cast<Eigen::Index>(interior);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    // Row r is q_r - 2 q_{r+1} + q_{r+2} over full waypoints 0..m+1; column c is
    // interior waypoint c+1.
    for (Eigen::Index r = 0; r < m; ++r) {
      if (r - 1 >= 0) a(r, r - 1) = 1.0;
      a(r, r) = -2.0;
      if (r + 1 < m) a(r, r + 1) = 1.0;
    }
    metric_ = a.transpose() * a / std::pow(dt, 4);
    llt_.compute(metric_);
  }

  // Applies M^-1 to a gradient laid out waypoint-major (dof entries per waypoint).
  // `fixed` marks coordinates that stay put; their output entries are zero.
  Eigen::VectorXd solve(const Eigen::VectorXd& g, Eigen::Index dof,
                        const std::vector<bool>& fixed) const {
    const Eigen::Index m = g.size() / dof;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
    for (Eigen::Index j = 0; j < dof; ++j) {
      std::vector<Eigen::Index> free;
      for (Eigen::Index k = 0; k < m; ++k) {
        if (!fixed[static_cast<std::size_t>(k * dof + j)]) free.push_back(k);
      }
      if (free.empty()) continue;
      const auto n = static_cast<Eigen::Index>(free.size());
      Eigen::VectorXd rhs(n);
      for (Eigen::Index i = 0; i < n; ++i) rhs[i] = g[free[i] * dof + j];
      Eigen::VectorXd sol;
      if (n == m) {
        sol = llt_.solve(rhs);
      } else {
        Eigen::MatrixXd sub(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
          for (Eigen::Index c = 0; c < n; ++c) sub(r, c) = metric_(free[r], free[c]);
        }
        sol = sub.llt().solve(rhs);
      }
      for (Eigen::Index i = 0; i < n; ++i) out[free[i] * dof + j] = sol[i];
    }
    return out;
  }

 private:
  Eigen::MatrixXd metric_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void OptimizerOptions::validate() const {
  require(max_iters >= 1, "max_iters must be >= 1");
  require(grad_tol > 0.0, "grad_tol must be positive");
  require(step_init > 0.0, "step_init must be positive");
  require(step_shrink > 0.0 && step_shrink < 1.0, "step_shrink must lie in (0, 1)");
  require(step_grow > 1.0, "step_grow must exceed 1");
  require(min_step > 0.0, "min_step must be positive");
  require(memory >= 0, "memory must be non-negative");
}

OptResult minimize(const TrajectoryObjective& f, const JointTrajectory& init,
                   const ChainSpec& chain, const OptimizerOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  opts.validate();
  init.validate();
  require(init.dof() == chain.dof(), "initial trajectory dimension does not match chain");

  const auto dof = static_cast<Eigen::Index>(chain.dof());
  const std::size_t interior = init.size() - 2;
  Eigen::VectorXd lo(dof * static_cast<Eigen::Index>(interior));
  Eigen::VectorXd hi(lo.size());
  for (std::size_t k = 0; k < interior; ++k) {
    for (Eigen::Index j = 0; j < dof; ++j) {
      const auto& lim = chain.joint_limits[static_cast<std::size_t>(j)];
      lo[static_cast<Eigen::Index>(k) * dof + j] = lim.lo;
      hi[static_cast<Eigen::Index>(k) * dof + j] = lim.hi;
    }
  }

  for (const JointConfig& q : init.waypoints) {
    if (!q.allFinite()) throw OptimizationError("initial trajectory has non-finite joint values");
  }

  OptResult result;
  result.trajectory = init;
  Eigen::VectorXd x = project(pack_interior(init), lo, hi);
  unpack_interior(x, result.trajectory);

  CostReport current = f(result.trajectory);
  if (!all_finite(current)) {
    throw OptimizationError("objective is not finite at the initial trajectory (total = " +
                            std::to_string(current.total) + ")");
  }
  result.initial_report = current;

  if (opts.fd_check) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, x.size() - 1);
    JointTrajectory probe = result.trajectory;
    double max_abs_err = 0.0, max_fd = 0.0;
    const double h = 1e-6;
    for (int s = 0; s < std::min<Eigen::Index>(20, x.size()); ++s) {
      const Eigen::Index i = pick(rng);
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      unpack_interior(xp, probe);
      const double fp = f(probe).total;
      unpack_interior(xm, probe);
      const double fm = f(probe).total;
      const double fd = (fp - fm) / (2.0 * h);
      max_abs_err = std::max(max_abs_err, std::abs(fd - current.gradient[i]));
      max_fd = std::max(max_fd, std::abs(fd));
    }
    result.fd_max_rel_error = max_abs_err / std::max(max_fd, 1e-8);
  }

  const AccelerationMetric metric(interior, init.dt);
  double step = opts.step_init;
  JointTrajectory candidate = result.trajectory;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;  // (s, y) pairs

  // A coordinate is held when it sits on a limit and the gradient pushes outward.
  std::vector<bool> held;
  const auto update_held = [&](const Eigen::VectorXd& g) {
    held.assign(static_cast<std::size_t>(x.size()), false);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      held[static_cast<std::size_t>(i)] = (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0);
    }
  };
  const auto mask = [&](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (held[static_cast<std::size_t>(i)]) v[i] = 0.0;
    }
    return v;
  };

  for (int iter = 0;; ++iter) {
    update_held(current.gradient);
    const Eigen::VectorXd pg = mask(current.gradient);
    if (pg.size() == 0 || pg.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      result.converged = true;
      break;
    }
    if (iter >= opts.max_iters) {
      std::ostringstream msg;
      msg << "iteration limit reached; projected gradient inf-norm " << pg.lpNorm<Eigen::Infinity>();
      result.diagnostic = msg.str();
      break;
    }

    // Two-loop recursion with the acceleration metric as the initial inverse Hessian.
    Eigen::VectorXd direction;
    if (!memory.empty()) {
      Eigen::VectorXd q = pg;
      std::vector<double> rho(memory.size()), a(memory.size());
      for (std::size_t i = memory.size(); i-- > 0;) {
        rho[i] = 1.0 / memory[i].second.dot(memory[i].first);
        a[i] = rho[i] * memory[i].first.dot(q);
        q -= a[i] * memory[i].second;
      }
      const auto& [s_last, y_last] = memory.back();
      const Eigen::VectorXd py = metric.solve(y_last, dof, held);
      const double yPy = y_last.dot(py);
      Eigen::VectorXd r = metric.solve(mask(q), dof, held);
      if (yPy > 0.0) r *= s_last.dot(y_last) / yPy;
      for (std::size_t i = 0; i < memory.size(); ++i) {
        const double b = rho[i] * memory[i].second.dot(r);
        r += (a[i] - b) * memory[i].first;
      }
      direction = mask(-r);
      if (!(direction.dot(pg) < 0.0)) memory.clear();
    }
    const bool quasi_newton = !memory.empty();
    if (!quasi_newton) direction = -metric.solve(pg, dof, held);

    double alpha = quasi_newton ? 1.0 : step;
    bool accepted = false;
    Eigen::VectorXd x_next;
    CostReport next;
    while (alpha >= opts.min_step) {
      x_next = project(x + alpha * direction, lo, hi);
      const Eigen::VectorXd delta = x_next - x;
      if (delta.lpNorm<Eigen::Infinity>() == 0.0) break;
      unpack_interior(x_next, candidate);
      next = f(candidate);
      const double predicted = std::min(current.gradient.dot(delta), 0.0);
      if (all_finite(next) && next.total <= current.total + kArmijo * predicted &&
          next.total <= current.total) {
        accepted = true;
        break;
      }
      alpha *= opts.step_shrink;
    }
    if (!accepted && quasi_newton) {
      // Retry once along the preconditioned gradient before giving up.
      memory.clear();
      --iter;
      continue;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "line search failed at minimum step; projected gradient inf-norm "
          << pg.lpNorm<Eigen::Infinity>();
      result.diagnostic = msg.str();
      break;
    }

    if (opts.memory > 0) {
      Eigen::VectorXd s_k = x_next - x;
      Eigen::VectorXd y_k = next.gradient - current.gradient;
      if (s_k.dot(y_k) > 1e-12 * s_k.norm() * y_k.norm()) {
        memory.emplace_back(std::move(s_k), std::move(y_k));
        if (memory.size() > static_cast<std::size_t>(opts.memory)) memory.pop_front();
      }
    }
    x = std::move(x_next);
    current = std::move(next);
    unpack_interior(x, result.trajectory);
    result.iterations = iter + 1;
    if (opts.record_trace) result.trace.push_back({iter + 1, current.total, current.per_cost, alpha});
    if (!quasi_newton) step = alpha * opts.step_grow;
  }

  result.final_report = std::move(current);
  result.wall_time = seconds_since(started);
  return result;
}

OptResult optimize(const CostContext& ctx, const CostWeights& w, const JointTrajectory& init,
                   const OptimizerOptions& opts) {
  w.validate();
  ctx.check_aligned(init);
  require(init.waypoints.front() == ctx.nominal().waypoints.front(),
          "initial trajectory must start at the nominal start configuration");
  require(init.waypoints.back() == ctx.goal_config(),
          "initial trajectory must end at the goal configuration");
  return minimize([&](const JointTrajectory& t) { return objective(t, ctx, w); }, init,
                  ctx.chain(), opts);
}

JointTrajectory straightline_joint_init(const JointConfig& start, const JointConfig& goal,
                                        std::size_t count, double dt, double t0) {
  require(count >= 3, "straight-line init needs at least 3 waypoints");
  require(start.size() == goal.size(), "start and goal dimensions differ");
  require(dt > 0.0, "dt must be positive");
  JointTrajectory traj;
  traj.dt = dt;
  traj.t0 = t0;
  traj.waypoints.reserve(count);
  const double last = static_cast<double>(count - 1);
  traj.waypoints.push_back(start);
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double s = static_cast<double>(k) / last;
    traj.waypoints.push_back(start + s * (goal - start));
  }
  traj.waypoints.push_back(goal);
  return traj;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,total";
  if (!trace.empty()) {
    for (const auto& [name, value] : trace.front().per_cost) out << ',' << name;
  }
  out << ",step\n";
  for (const auto& row : trace) {
    out << row.iteration << ',' << row.total;
    for (const auto& [name, value] : row.per_cost) out << ',' << value;
    out << ',' << row.step << '\n';
  }
  return out.str();
}

}  // namespace comoto
