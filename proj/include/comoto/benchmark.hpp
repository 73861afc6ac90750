#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "comoto/baselines.hpp"
#include "comoto/costs.hpp"
#include "comoto/human_motion.hpp"
#include "comoto/metrics.hpp"
#include "comoto/optimizer.hpp"
#include "comoto/scenario.hpp"

namespace comoto {

enum class Method { kCoMOTO, kNominal, kSpeedAdj, kLegible, kDistVis };

inline constexpr std::array<Method, 5> kAllMethods = {Method::kCoMOTO, Method::kNominal,
                                                      Method::kSpeedAdj, Method::kLegible,
                                                      Method::kDistVis};

/// "CoMOTO", "Nominal", "Speed-Adj", "Legible", "Dist+Vis".
std::string_view method_name(Method method);
Method parse_method(std::string_view name);

/// Every tunable of a benchmark run.
struct RunConfig {
  ChainSpec chain = default_chain();
  SkeletonOffsets skeleton = SkeletonOffsets::defaults();
  ScenarioGeometry geometry;

  CostWeights comoto{1.0, 0.02, 10.0, 1.0, 1e-3};
  double eps_m = kDefaultMahalanobisClamp;
  double sigma_floor = 0.01;
  double nominal_smoothing = 0.01;  // m, Huber width of the nominal term
  BaselineWeights baselines;
  NominalWeights nominal;
  OptimizerOptions optimizer;
  PredictorOptions predictor;
  double prediction_step = 0.01;  // s
  SpeedAdjustParams speed;
  MetricThresholds thresholds;

  std::vector<ScenarioFamily> families{kAllFamilies.begin(), kAllFamilies.end()};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t workers = 1;
  std::string out_dir = "out";

  /// Seeds non-empty and distinct, families non-empty, all sub-options valid.
  void validate() const;
};

struct ResultRow {
  ScenarioFamily family = ScenarioFamily::kStationary;
  std::uint64_t seed = 0;
  Method method = Method::kCoMOTO;
  MetricReport metrics;
  bool converged = true;  // optimized methods only; true otherwise
  int iterations = 0;
  bool failed = false;
  std::string message;
  double wall_time = 0.0;  // s, not part of the deterministic CSV

  bool operator==(const ResultRow&) const = default;
};

/// Sorted by (family, seed, method enum order).
void sort_rows(std::vector<ResultRow>& rows);

/// Per-scenario outputs kept for inspection: the shared nominal, each method's
/// robot motion and the ground-truth human.
struct ScenarioArtifacts {
  Scenario scenario;
  HumanTrajectory human_truth;
  PredictedHumanTrajectory prediction;  // on the waypoint grid
  JointTrajectory nominal;
  std::uint64_t nominal_hash = 0;
  /// Hash of the nominal as seen by each consumer (Nominal, Speed-Adj, Dist+Vis
  /// init, CoMOTO context). All must equal nominal_hash.
  std::vector<std::uint64_t> nominal_hash_uses;
  std::array<std::optional<JointTrajectory>, kAllMethods.size()> trajectories;
  std::optional<ExecutionTrace> speed_trace;
};

struct BenchmarkResult {
  std::vector<ResultRow> rows;
  std::vector<ScenarioArtifacts> artifacts;  // sorted by (family, seed)
};

/// FNV-1a over the waypoint bytes, dt and t0.
std::uint64_t trajectory_hash(const JointTrajectory& traj);

/// Ground truth, prediction on the waypoint grid, nominal and context for one scenario.
struct PreparedScenario {
  HumanTrajectory truth;
  PredictedHumanTrajectory prediction;
  JointTrajectory nominal;
  OptResult nominal_result;
  CostContext context;
};
PreparedScenario prepare_scenario(const Scenario& scenario, const RunConfig& config);

/// Metrics of a waypoint trajectory against ground truth.
MetricReport evaluate_trajectory(const JointTrajectory& traj, const JointTrajectory& nominal,
                                 const Scenario& scenario, const HumanTrajectory& truth,
                                 const MetricThresholds& thresholds);
MetricReport evaluate_trace(const ExecutionTrace& trace, const JointTrajectory& nominal,
                            const Scenario& scenario, const HumanTrajectory& truth,
                            const MetricThresholds& thresholds);

/// Goals used by the legibility metric: the robot goal position and, as the single
/// distractor, the human's object.
GoalSet scenario_goals(const Scenario& scenario);

/// All five methods on one scenario. Method failures become failed rows.
std::vector<ResultRow> run_scenario(const Scenario& scenario, const RunConfig& config,
                                    ScenarioArtifacts* artifacts = nullptr);

/// Every (family, seed, method) of the config; rows sorted deterministically.
BenchmarkResult run_benchmark(const RunConfig& config);

}  // namespace comoto
