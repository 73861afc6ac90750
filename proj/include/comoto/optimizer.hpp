#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "comoto/costs.hpp"
#include "comoto/kinematics.hpp"

namespace comoto {

struct OptimizerOptions {
  int max_iters = 500;
  double grad_tol = 1e-4;
  double step_init = 1.0;
  double step_shrink = 0.5;
  double step_grow = 2.0;
  /// Compare the analytic gradient against central differences at the initial
  /// trajectory on a seeded sample of coordinates.
  bool fd_check = false;
  std::uint64_t seed = 0;
  /// Backtracking gives up below this step.
  double min_step = 1e-16;
  /// Number of curvature pairs kept for quasi-Newton updates of the preconditioned
  /// direction; 0 gives plain preconditioned gradient descent.
  int memory = 10;
  /// Record one TraceRow per iteration.
  bool record_trace = false;

  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double total = 0.0;
  std::map<std::string, double> per_cost;
  double step = 0.0;
};

struct OptResult {
  JointTrajectory trajectory;
  int iterations = 0;
  bool converged = false;
  CostReport initial_report;
  CostReport final_report;
  double wall_time = 0.0;  // s
  std::vector<TraceRow> trace;
  std::string diagnostic;
  /// Max relative error of the seeded gradient check, when requested.
  std::optional<double> fd_max_rel_error;
};

/// Any objective over a full trajectory that reports its gradient over the
/// interior waypoints (same layout as CostReport::gradient).
using TrajectoryObjective = std::function<CostReport(const JointTrajectory&)>;

/// Minimizes `f` over the interior waypoints of `init`, endpoints held fixed and
/// joint limits of `chain` enforced by projection. Descent directions are
/// preconditioned by the discrete acceleration metric so that the smoothness term
/// is well conditioned.
OptResult minimize(const TrajectoryObjective& f, const JointTrajectory& init,
                   const ChainSpec& chain, const OptimizerOptions& opts);

/// Weighted CoMOTO objective under the fixed-endpoint constraint. `init` must
/// start at the nominal's first waypoint and end at the context goal.
OptResult optimize(const CostContext& ctx, const CostWeights& w, const JointTrajectory& init,
                   const OptimizerOptions& opts);

/// Linear joint-space interpolation with exact endpoints.
JointTrajectory straightline_joint_init(const JointConfig& start, const JointConfig& goal,
                                        std::size_t count, double dt, double t0 = 0.0);

/// CSV with columns iteration,total,<per-cost names...>,step.
std::string trace_csv(const std::vector<TraceRow>& trace);

}  // namespace comoto
