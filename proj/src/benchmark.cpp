#include "comoto/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "comoto/errors.hpp"

namespace comoto {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

ResultRow failed_row(const Scenario& s, Method m, const std::string& what) {
  ResultRow row;
  row.family = s.family;
  row.seed = s.seed;
  row.method = m;
  row.failed = true;
  row.converged = false;
  row.message = what;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.metrics = {nan, nan, nan, nan, false};
  return row;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kCoMOTO: return "CoMOTO";
    case Method::kNominal: return "Nominal";
    case Method::kSpeedAdj: return "Speed-Adj";
    case Method::kLegible: return "Legible";
    case Method::kDistVis: return "Dist+Vis";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw UsageError("unknown method '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  chain.validate();
  comoto.validate();
  optimizer.validate();
  speed.validate();
  require(eps_m > 0.0, "eps_m must be positive");
  require(sigma_floor > 0.0, "sigma_floor must be positive");
  require(nominal_smoothing >= 0.0, "nominal_smoothing must be non-negative");
  require(prediction_step > 0.0, "prediction_step must be positive");
  require(!families.empty(), "run config needs at least one family");
  require(!seeds.empty(), "run config needs at least one seed");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  require(unique.size() == seeds.size(), "run config seeds must be distinct");
  std::set<ScenarioFamily> fam(families.begin(), families.end());
  require(fam.size() == families.size(), "run config families must be distinct");
  require(geometry.waypoints >= 3, "waypoint count must be at least 3");
  require(geometry.robot_duration > 0.0 && geometry.rate > 0.0 && geometry.observation > 0.0,
          "durations and rates must be positive");
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.family != b.family) return a.family < b.family;
    if (a.seed != b.seed) return a.seed < b.seed;
    return a.method < b.method;
  });
}

std::uint64_t trajectory_hash(const JointTrajectory& traj) {
  std::uint64_t h = 14695981039346656037ULL;
  fnv_bytes(h, &traj.dt, sizeof traj.dt);
  fnv_bytes(h, &traj.t0, sizeof traj.t0);
  for (const auto& q : traj.waypoints) {
    fnv_bytes(h, q.data(), static_cast<std::size_t>(q.size()) * sizeof(double));
  }
  return h;
}

PreparedScenario prepare_scenario(const Scenario& s, const RunConfig& c) {
  const ScenarioGeometry& g = c.geometry;
  const HumanTrajectory truth = generate_reach(s.human_script, g.rate, c.skeleton);
  const auto observed_count = static_cast<std::size_t>(std::llround(g.observation * g.rate)) + 1;
  require(truth.sample_count() > observed_count, "human trajectory shorter than the observation");
  const HumanTrajectory observed = truth.prefix(observed_count);

  const double t0 = observed.duration();
  const double dt = g.robot_duration / static_cast<double>(g.waypoints - 1);
  PredictorOptions popts = c.predictor;
  popts.goal = s.human_script.arm_goal;
  const auto horizon =
      static_cast<std::size_t>(std::ceil(g.robot_duration / c.prediction_step - 1e-9)) + 1;
  const PredictedHumanTrajectory arm = predict(observed, horizon, c.prediction_step, popts);
  const PredictedHumanTrajectory full = extrapolate_skeleton(arm, c.skeleton);
  PredictedHumanTrajectory grid = resample(full, t0, g.waypoints, dt);

  NominalProblem problem{s.chain, s.robot_start, s.robot_goal, s.obstacles, g.waypoints, dt, t0};
  OptResult nominal_result = nominal_trajectory(problem, c.nominal, c.optimizer);
  JointTrajectory nominal = nominal_result.trajectory;

  CostContext ctx = CostContext(s.chain, grid, nominal, s.human_object, s.robot_goal, c.eps_m,
                                c.sigma_floor)
                        .with_nominal_smoothing(c.nominal_smoothing);
  return {truth, std::move(grid), std::move(nominal), std::move(nominal_result), std::move(ctx)};
}

GoalSet scenario_goals(const Scenario& s) {
  return GoalSet{fk_eef(s.chain, s.robot_goal), {s.human_object}};
}

MetricReport evaluate_trajectory(const JointTrajectory& traj, const JointTrajectory& nominal,
                                 const Scenario& s, const HumanTrajectory& truth,
                                 const MetricThresholds& th) {
  const TimedPath path = TimedPath::from(traj);
  MetricReport r;
  r.dst_pct = metric_separation(path, s.chain, truth, th.separation);
  r.vis_pct = metric_visibility(path, s.chain, truth, s.human_object, th.fov_deg);
  r.legibility = metric_legibility(path, s.chain, scenario_goals(s), th.legibility_length_unit);
  r.nom_dev = metric_nominal_dev(traj, nominal, s.chain);
  r.completed = true;
  return r;
}

MetricReport evaluate_trace(const ExecutionTrace& trace, const JointTrajectory& nominal,
                            const Scenario& s, const HumanTrajectory& truth,
                            const MetricThresholds& th) {
  const TimedPath path = TimedPath::from(trace);
  MetricReport r;
  r.dst_pct = metric_separation(path, s.chain, truth, th.separation);
  r.vis_pct = metric_visibility(path, s.chain, truth, s.human_object, th.fov_deg);
  r.legibility = metric_legibility(path, s.chain, scenario_goals(s), th.legibility_length_unit);
  r.nom_dev = metric_nominal_dev(trace, nominal, s.chain);
  r.completed = trace.completed;
  return r;
}

std::vector<ResultRow> run_scenario(const Scenario& s, const RunConfig& c,
                                    ScenarioArtifacts* artifacts) {
  std::vector<ResultRow> rows;
  const auto base_row = [&](Method m) {
    ResultRow row;
    row.family = s.family;
    row.seed = s.seed;
    row.method = m;
    return row;
  };

  std::optional<PreparedScenario> prep;
  const auto prep_start = Clock::now();
  try {
    prep.emplace(prepare_scenario(s, c));
  } catch (const std::exception& e) {
    for (Method m : kAllMethods) rows.push_back(failed_row(s, m, std::string("setup: ") + e.what()));
    return rows;
  }
  const double prep_time = seconds_since(prep_start);
  const JointTrajectory& nominal = prep->nominal;
  const std::uint64_t hash = trajectory_hash(nominal);
  if (artifacts) {
    artifacts->scenario = s;
    artifacts->human_truth = prep->truth;
    artifacts->prediction = prep->prediction;
    artifacts->nominal = nominal;
    artifacts->nominal_hash = hash;
    artifacts->nominal_hash_uses.clear();
  }
  const auto use_nominal = [&](const JointTrajectory& seen) {
    if (artifacts) artifacts->nominal_hash_uses.push_back(trajectory_hash(seen));
  };

  const auto run_optimized = [&](Method m, auto&& solve) {
    const auto start = Clock::now();
    try {
      const OptResult res = solve();
      ResultRow row = base_row(m);
      row.metrics = evaluate_trajectory(res.trajectory, nominal, s, prep->truth, c.thresholds);
      row.converged = res.converged;
      row.iterations = res.iterations;
      row.message = res.diagnostic;
      row.wall_time = seconds_since(start);
      if (artifacts) artifacts->trajectories[static_cast<std::size_t>(m)] = res.trajectory;
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      rows.push_back(failed_row(s, m, e.what()));
      rows.back().wall_time = seconds_since(start);
    }
  };

  // CoMOTO
  use_nominal(prep->context.nominal());
  CostWeights w = c.comoto;
  run_optimized(Method::kCoMOTO, [&] { return optimize(prep->context, w, nominal, c.optimizer); });

  // Nominal
  {
    use_nominal(nominal);
    const auto start = Clock::now();
    try {
      ResultRow row = base_row(Method::kNominal);
      row.metrics = evaluate_trajectory(nominal, nominal, s, prep->truth, c.thresholds);
      row.converged = prep->nominal_result.converged;
      row.iterations = prep->nominal_result.iterations;
      row.wall_time = prep_time + seconds_since(start);
      if (artifacts) artifacts->trajectories[static_cast<std::size_t>(Method::kNominal)] = nominal;
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      rows.push_back(failed_row(s, Method::kNominal, e.what()));
    }
  }

  // Speed-Adj
  {
    use_nominal(nominal);
    const auto start = Clock::now();
    try {
      SpeedAdjustParams p = c.speed;
      p.timeout = c.geometry.timeout_factor * nominal.duration();
      const ExecutionTrace trace = speed_adjusted_execute(nominal, s.chain, prep->truth, p);
      ResultRow row = base_row(Method::kSpeedAdj);
      row.metrics = evaluate_trace(trace, nominal, s, prep->truth, c.thresholds);
      row.iterations = static_cast<int>(trace.timestamps.size());
      if (!trace.completed) row.message = "timeout before the end of the path";
      row.wall_time = seconds_since(start);
      if (artifacts) artifacts->speed_trace = trace;
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      rows.push_back(failed_row(s, Method::kSpeedAdj, e.what()));
    }
  }

  run_optimized(Method::kLegible,
                [&] { return legible_optimize(prep->context, c.optimizer, c.baselines); });

  use_nominal(prep->context.nominal());
  run_optimized(Method::kDistVis,
                [&] { return distvis_optimize(prep->context, c.optimizer, c.baselines); });

  sort_rows(rows);
  return rows;
}

BenchmarkResult run_benchmark(const RunConfig& config) {
  config.validate();
  std::vector<Scenario> scenarios;
  for (ScenarioFamily f : config.families) {
    auto batch = generate_scenarios(f, config.seeds, config.geometry, config.chain);
    scenarios.insert(scenarios.end(), std::make_move_iterator(batch.begin()),
                     std::make_move_iterator(batch.end()));
  }

  std::vector<std::vector<ResultRow>> per_scenario(scenarios.size());
  std::vector<ScenarioArtifacts> artifacts(scenarios.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      per_scenario[i] = run_scenario(scenarios[i], config, &artifacts[i]);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, scenarios.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  BenchmarkResult out;
  for (auto& rows : per_scenario) {
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  sort_rows(out.rows);
  std::vector<std::size_t> order(scenarios.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scenarios[a].family != scenarios[b].family) return scenarios[a].family < scenarios[b].family;
    return scenarios[a].seed < scenarios[b].seed;
  });
  for (std::size_t i : order) out.artifacts.push_back(std::move(artifacts[i]));
  require(out.rows.size() == scenarios.size() * kAllMethods.size(), "benchmark dropped rows");
  return out;
}

}  // namespace comoto
