#include "comoto/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "comoto/errors.hpp"

namespace comoto {

namespace {

double percent(std::size_t hits, std::size_t total) {
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

void require_path(const TimedPath& path) {
  require(!path.configs.empty(), "metric needs a non-empty trajectory");
  require(path.times.size() == path.configs.size(), "path times and configs differ in length");
}

}  // namespace

TimedPath TimedPath::from(const JointTrajectory& traj) {
  TimedPath p;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    p.times.push_back(traj.time_at(k));
    p.configs.push_back(traj.waypoints[k]);
  }
  return p;
}

TimedPath TimedPath::from(const ExecutionTrace& trace) {
  return TimedPath{trace.timestamps, trace.configs};
}

void GoalSet::validate() const {
  require(!distractors.empty(), "legibility needs at least one distractor goal");
  std::vector<Vec3> all{true_goal};
  all.insert(all.end(), distractors.begin(), distractors.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      require((all[i] - all[j]).norm() > 1e-12, "goal set contains coincident goals");
    }
  }
}

double metric_separation(const TimedPath& path, const ChainSpec& chain,
                         const HumanTrajectory& human_truth, double threshold) {
  require_path(path);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double d =
        min_separation(fk_points(chain, path.configs[k]), human_truth.pose_at(path.times[k]));
    if (d > threshold) ++hits;
  }
  return percent(hits, path.size());
}

double metric_visibility(const TimedPath& path, const ChainSpec& chain,
                         const HumanTrajectory& human_truth, const Vec3& target, double fov_deg,
                         std::vector<std::string>* flags) {
  require_path(path);
  const double half_fov = 0.5 * fov_deg * std::numbers::pi / 180.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Vec3 head = human_truth.position(HumanJoint::kHead, path.times[k]);
    const Vec3 gaze = target - head;
    const Vec3 to_eef = fk_eef(chain, path.configs[k]) - head;
    if (gaze.norm() < 1e-9 || to_eef.norm() < 1e-9) {
      if (flags) flags->push_back("visibility: degenerate gaze at t=" + std::to_string(path.times[k]));
      continue;
    }
    const double angle = std::atan2(gaze.cross(to_eef).norm(), gaze.dot(to_eef));
    if (angle <= half_fov) ++hits;
  }
  return percent(hits, path.size());
}

double legibility_score_from_points(const std::vector<Vec3>& eef, const GoalSet& goals,
                                    double length_unit) {
  goals.validate();
  require(!eef.empty(), "metric needs a non-empty trajectory");
  require(length_unit > 0.0, "legibility length unit must be positive");

  std::vector<Vec3> all{goals.true_goal};
  all.insert(all.end(), goals.distractors.begin(), goals.distractors.end());
  const std::size_t count = eef.size();
  const Vec3& start = eef.front();

  double prefix = 0.0, weighted = 0.0, weight_sum = 0.0;
  std::vector<double> log_p(all.size());
  for (std::size_t t = 0; t < count; ++t) {
    if (t > 0) prefix += (eef[t] - eef[t - 1]).norm();
    // log P(g | S -> Q) = (C*(S->g) - C(S->Q) - C*(Q->g)) / unit
    for (std::size_t g = 0; g < all.size(); ++g) {
      log_p[g] = ((all[g] - start).norm() - prefix - (all[g] - eef[t]).norm()) / length_unit;
    }
    const double top = *std::max_element(log_p.begin(), log_p.end());
    double norm = 0.0;
    for (double lp : log_p) norm += std::exp(lp - top);
    const double p_true = std::exp(log_p[0] - top) / norm;
    const double f = static_cast<double>(count - 1 - t);
    weighted += f * p_true;
    weight_sum += f;
  }
  // A single-step path has no weight; report chance level.
  const double n_goals = static_cast<double>(all.size());
  const double mean_p = weight_sum > 0.0 ? weighted / weight_sum : 1.0 / n_goals;
  return 100.0 * (mean_p - 1.0 / n_goals) * n_goals / (n_goals - 1.0);
}

double metric_legibility(const TimedPath& path, const ChainSpec& chain, const GoalSet& goals,
                         double length_unit) {
  require_path(path);
  std::vector<Vec3> eef;
  eef.reserve(path.size());
  for (const auto& q : path.configs) eef.push_back(fk_eef(chain, q));
  return legibility_score_from_points(eef, goals, length_unit);
}

double metric_nominal_dev(const JointTrajectory& traj, const JointTrajectory& nominal,
                          const ChainSpec& chain) {
  require(!traj.waypoints.empty(), "metric needs a non-empty trajectory");
  require(traj.size() == nominal.size(),
          "nominal deviation needs equal waypoint counts (" + std::to_string(traj.size()) +
              " vs " + std::to_string(nominal.size()) + ")");
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    sum += (fk_eef(chain, traj.waypoints[k]) - fk_eef(chain, nominal.waypoints[k])).squaredNorm();
  }
  return sum;
}

double metric_nominal_dev(const ExecutionTrace& trace, const JointTrajectory& nominal,
                          const ChainSpec& chain) {
  require(!trace.timestamps.empty(), "metric needs a non-empty trace");
  JointTrajectory sampled = nominal;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < nominal.size(); ++k) {
    const double t = nominal.time_at(k);
    while (cursor + 1 < trace.timestamps.size() && trace.timestamps[cursor + 1] <= t) ++cursor;
    if (cursor + 1 >= trace.timestamps.size() || trace.timestamps[cursor] >= t) {
      sampled.waypoints[k] = trace.configs[cursor];
      continue;
    }
    const double t0 = trace.timestamps[cursor], t1 = trace.timestamps[cursor + 1];
    const double frac = (t - t0) / (t1 - t0);
    sampled.waypoints[k] = (1.0 - frac) * trace.configs[cursor] + frac * trace.configs[cursor + 1];
  }
  return metric_nominal_dev(sampled, nominal, chain);
}

MeanSd mean_sd(const std::vector<double>& values) {
  require(!values.empty(), "cannot aggregate zero values");
  MeanSd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

MetricAggregate aggregate(const std::vector<MetricReport>& reports) {
  require(!reports.empty(), "aggregate needs at least one report");
  std::vector<double> dst, vis, leg, nom;
  for (const auto& r : reports) {
    dst.push_back(r.dst_pct);
    vis.push_back(r.vis_pct);
    leg.push_back(r.legibility);
    nom.push_back(r.nom_dev);
  }
  return {mean_sd(dst), mean_sd(vis), mean_sd(leg), mean_sd(nom), reports.size()};
}

}  // namespace comoto
