#include "comoto/human_motion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "comoto/errors.hpp"

namespace comoto {

namespace {

constexpr std::array<std::string_view, kHumanJointCount> kJointNames = {
    "right_shoulder", "right_elbow", "right_wrist",   "right_palm",
    "neck",           "head",        "torso",         "left_shoulder",
    "left_elbow",     "left_wrist",  "left_palm",
};

double min_jerk_rate(double tau) {
  const double t2 = tau * tau;
  return 30.0 * t2 - 60.0 * t2 * tau + 30.0 * t2 * t2;
}

// Inverse of min_jerk_fraction on [0, 1]; the quintic is monotone there.
double invert_min_jerk(double fraction) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (min_jerk_fraction(mid) < fraction ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Seeded smooth perturbation: moving average of white noise over `window` samples,
// rescaled so each axis has standard deviation `scale`.
std::vector<Vec3> smooth_noise(std::mt19937_64& rng, std::size_t count, std::size_t window,
                               double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> white(count + window - 1);
  for (auto& w : white) w = Vec3(normal(rng), normal(rng), normal(rng));

  std::vector<Vec3> out(count, Vec3::Zero());
  const double gain = scale / std::sqrt(static_cast<double>(window));
  Vec3 acc = Vec3::Zero();
  for (std::size_t k = 0; k < window; ++k) acc += white[k];
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = gain * acc;
    if (k + window < white.size()) acc += white[k + window] - white[k];
  }
  return out;
}

}  // namespace

std::string_view joint_name(HumanJoint j) { return kJointNames[index_of(j)]; }

std::optional<HumanJoint> joint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kHumanJointCount; ++i) {
    if (kJointNames[i] == name) return kAllHumanJoints[i];
  }
  return std::nullopt;
}

SkeletonOffsets SkeletonOffsets::defaults() {
  // Human faces -x; their right side is +y. Values in meters from the right shoulder.
  SkeletonOffsets s = zero();
  s[HumanJoint::kNeck] = Vec3(0.0, -0.18, 0.06);
  s[HumanJoint::kHead] = Vec3(0.0, -0.18, 0.25);
  s[HumanJoint::kTorso] = Vec3(0.0, -0.18, -0.25);
  s[HumanJoint::kLeftShoulder] = Vec3(0.0, -0.36, 0.0);
  s[HumanJoint::kLeftElbow] = Vec3(-0.08, -0.38, -0.26);
  s[HumanJoint::kLeftWrist] = Vec3(-0.30, -0.38, -0.34);
  s[HumanJoint::kLeftPalm] = Vec3(-0.38, -0.38, -0.35);
  return s;
}

SkeletonOffsets SkeletonOffsets::zero() {
  SkeletonOffsets s;
  for (auto& o : s.offsets) o = Vec3::Zero();
  return s;
}

double HumanTrajectory::duration() const {
  const auto n = sample_count();
  return n == 0 ? 0.0 : static_cast<double>(n - 1) / rate;
}

Vec3 HumanTrajectory::position(HumanJoint j, double t) const {
  const auto& tr = track(j);
  const double u = std::clamp(t * rate, 0.0, static_cast<double>(tr.size() - 1));
  const auto k = static_cast<std::size_t>(std::floor(u));
  if (k + 1 >= tr.size()) return tr.back();
  const double frac = u - static_cast<double>(k);
  if (frac == 0.0) return tr[k];
  return (1.0 - frac) * tr[k] + frac * tr[k + 1];
}

std::array<Vec3, kHumanJointCount> HumanTrajectory::pose_at(double t) const {
  std::array<Vec3, kHumanJointCount> pose;
  for (auto j : kAllHumanJoints) pose[index_of(j)] = position(j, t);
  return pose;
}

HumanTrajectory HumanTrajectory::prefix(std::size_t count) const {
  require(count <= sample_count(), "prefix longer than trajectory");
  HumanTrajectory out;
  out.rate = rate;
  for (std::size_t i = 0; i < kHumanJointCount; ++i) {
    out.samples[i].assign(samples[i].begin(),
                          samples[i].begin() + static_cast<std::ptrdiff_t>(count));
  }
  return out;
}

void HumanTrajectory::validate() const {
  require(rate > 0.0 && std::isfinite(rate), "human trajectory rate must be positive");
  require(!samples.front().empty(), "human trajectory has no samples");
  for (const auto& s : samples) {
    require(s.size() == samples.front().size(), "human trajectory tracks differ in length");
  }
}

void ReachScript::validate() const {
  require(move_duration > 0.0, "reach move_duration must be positive");
  require(move_duration <= total_duration, "reach move_duration exceeds total_duration");
  require(noise_scale >= 0.0, "reach noise_scale must be non-negative");
}

double min_jerk_fraction(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  const double t3 = tau * tau * tau;
  return t3 * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

HumanTrajectory generate_reach(const ReachScript& script, double rate,
                               const SkeletonOffsets& offsets) {
  require(rate > 0.0, "sample rate must be positive");
  script.validate();

  const auto count = static_cast<std::size_t>(std::floor(script.total_duration * rate + 1e-9)) + 1;
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.2 * rate)));

  std::mt19937_64 rng(script.seed);
  HumanTrajectory traj;
  traj.rate = rate;

  for (std::size_t a = 0; a < kRightArmJointCount; ++a) {
    std::vector<Vec3> noise;
    if (script.noise_scale > 0.0) noise = smooth_noise(rng, count, window, script.noise_scale);

    auto& track = traj.samples[a];
    track.resize(count);
    const Vec3& x0 = script.arm_start[a];
    const Vec3 delta = script.arm_goal[a] - x0;
    for (std::size_t k = 0; k < count; ++k) {
      const double t = static_cast<double>(k) / rate;
      const double tau = t / script.move_duration;
      if (tau >= 1.0) {
        track[k] = script.arm_goal[a];
        continue;
      }
      track[k] = x0 + min_jerk_fraction(tau) * delta;
      // The envelope vanishes at both ends so start and goal stay exact.
      if (!noise.empty()) track[k] += std::sin(std::numbers::pi * tau) * noise[k];
    }
  }

  const auto& shoulder = traj.samples[index_of(HumanJoint::kRightShoulder)];
  for (auto j : kAllHumanJoints) {
    if (is_right_arm(j)) continue;
    auto& track = traj.samples[index_of(j)];
    track.resize(count);
    for (std::size_t k = 0; k < count; ++k) track[k] = shoulder[k] + offsets[j];
  }
  return traj;
}

void PredictedHumanTrajectory::validate(double sigma_floor) const {
  require(horizon >= 1, "prediction horizon must be >= 1");
  require(step > 0.0, "prediction step must be positive");
  const double floor_var = sigma_floor * sigma_floor;
  for (std::size_t i = 0; i < kHumanJointCount; ++i) {
    const auto& track = tracks[i];
    if (track.empty()) continue;
    require(track.size() == horizon, "prediction track length differs from horizon");
    for (const auto& g : track) {
      require((g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
              "prediction covariance is not symmetric");
      require(g.cov.llt().info() == Eigen::Success,
              "prediction covariance is not positive definite");
      const double min_eig = Eigen::SelfAdjointEigenSolver<Mat3>(g.cov).eigenvalues().minCoeff();
      require(min_eig >= floor_var * (1.0 - 1e-9),
              "prediction covariance below sigma_floor^2");
    }
  }
}

double predicted_variance(double t_ahead, const PredictorOptions& options) {
  const double grow = options.kappa * t_ahead;
  const double var = options.sigma0 * options.sigma0 + grow * grow;
  return std::max(var, options.sigma_floor * options.sigma_floor);
}

PredictedHumanTrajectory predict(const HumanTrajectory& observed, std::size_t horizon,
                                 double step, const PredictorOptions& options) {
  observed.validate();
  require(horizon >= 1, "prediction horizon must be >= 1");
  require(step > 0.0, "prediction step must be positive");
  const auto required =
      static_cast<std::size_t>(std::llround(options.observation_window * observed.rate));
  require(observed.sample_count() >= std::max<std::size_t>(required, 1),
          "observed prefix has " + std::to_string(observed.sample_count()) +
              " samples, the observation window needs " + std::to_string(required));

  const std::size_t n = observed.sample_count();
  const std::size_t lag = std::min<std::size_t>(
      n - 1, std::max<std::size_t>(
                 1, static_cast<std::size_t>(std::lround(options.velocity_window * observed.rate))));

  ArmPoints last{}, velocity{};
  for (std::size_t a = 0; a < kRightArmJointCount; ++a) {
    const auto& tr = observed.samples[a];
    last[a] = tr.back();
    velocity[a] = lag == 0 ? Vec3::Zero()
                           : Vec3((tr[n - 1] - tr[n - 1 - lag]) * observed.rate /
                                  static_cast<double>(lag));
  }

  // Timing of the remaining reach, estimated from the palm's progress along its
  // start->goal segment under a minimum-jerk profile.
  bool use_goal = false;
  double remaining = 0.0;     // s until predicted arrival
  double period = 0.0;        // s, full reach duration
  double tau_now = 0.0;
  double fraction_now = 0.0;
  if (options.goal) {
    const std::size_t palm = index_of(HumanJoint::kRightPalm);
    const Vec3 x0 = observed.samples[palm].front();
    const Vec3 g = (*options.goal)[palm];
    const double dist = (g - x0).norm();
    if (dist < 1e-6) {
      use_goal = true;  // already at goal; hold
    } else {
      fraction_now = std::clamp((last[palm] - x0).dot(g - x0) / (dist * dist), 0.0, 1.0);
      if (fraction_now >= 1.0 - 1e-9) {
        use_goal = true;
      } else {
        tau_now = invert_min_jerk(fraction_now);
        const double speed = velocity[palm].norm();
        const double rate_now = min_jerk_rate(tau_now);
        if (speed > 1e-6 && rate_now > 1e-6) {
          period = dist * rate_now / speed;
          remaining = period * (1.0 - tau_now);
          use_goal = true;
        }
      }
    }
  }

  const double span = static_cast<double>(horizon - 1) * step;
  const double ramp = use_goal ? std::min(span, remaining) : 0.0;

  PredictedHumanTrajectory out;
  out.t_start = observed.duration();
  out.step = step;
  out.horizon = horizon;
  for (std::size_t a = 0; a < kRightArmJointCount; ++a) {
    auto& track = out.tracks[a];
    track.resize(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
      const double t_ahead = static_cast<double>(k) * step;
      Vec3 mean;
      if (!use_goal) {
        mean = last[a] + velocity[a] * t_ahead;
      } else {
        const Vec3 cv = last[a] + velocity[a] * std::min(t_ahead, remaining);
        const Vec3& g = (*options.goal)[a];
        Vec3 toward_goal = g;
        if (remaining > 0.0 && t_ahead < remaining) {
          const double progressed =
              (min_jerk_fraction(tau_now + t_ahead / period) - fraction_now) / (1.0 - fraction_now);
          toward_goal = last[a] + (g - last[a]) * progressed;
        }
        const double w = ramp > 0.0 ? std::min(1.0, t_ahead / ramp) : 1.0;
        mean = (1.0 - w) * cv + w * toward_goal;
      }
      track[k].mean = mean;
      track[k].cov = predicted_variance(t_ahead, options) * Mat3::Identity();
    }
  }
  return out;
}

PredictedHumanTrajectory extrapolate_skeleton(const PredictedHumanTrajectory& arm_prediction,
                                              const SkeletonOffsets& offsets) {
  require(arm_prediction.has(HumanJoint::kRightShoulder),
          "arm prediction lacks the right-shoulder track");
  PredictedHumanTrajectory out = arm_prediction;
  const auto& shoulder = arm_prediction.tracks[index_of(HumanJoint::kRightShoulder)];
  for (auto j : kAllHumanJoints) {
    if (is_right_arm(j)) continue;
    auto& track = out.tracks[index_of(j)];
    track.resize(arm_prediction.horizon);
    for (std::size_t k = 0; k < arm_prediction.horizon; ++k) {
      track[k].mean = shoulder[k].mean + offsets[j];
      track[k].cov = shoulder[k].cov;
    }
  }
  return out;
}

PredictedHumanTrajectory resample(const PredictedHumanTrajectory& prediction, double t0,
                                  std::size_t count, double dt) {
  require(prediction.horizon >= 1, "cannot resample an empty prediction");
  require(count >= 1 && dt > 0.0, "resample grid must be non-empty with dt > 0");
  PredictedHumanTrajectory out;
  out.t_start = t0;
  out.step = dt;
  out.horizon = count;
  const double last = static_cast<double>(prediction.horizon - 1);
  for (std::size_t i = 0; i < kHumanJointCount; ++i) {
    const auto& src = prediction.tracks[i];
    if (src.empty()) continue;
    auto& dst = out.tracks[i];
    dst.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double t = t0 + static_cast<double>(k) * dt;
      const double u = std::clamp((t - prediction.t_start) / prediction.step, 0.0, last);
      const auto lo = static_cast<std::size_t>(std::floor(u));
      const auto hi = std::min(lo + 1, prediction.horizon - 1);
      const double frac = u - static_cast<double>(lo);
      dst[k].mean = (1.0 - frac) * src[lo].mean + frac * src[hi].mean;
      dst[k].cov = (1.0 - frac) * src[lo].cov + frac * src[hi].cov;
    }
  }
  return out;
}

PredictedHumanTrajectory scale_covariances(const PredictedHumanTrajectory& prediction,
                                           double factor) {
  require(factor > 0.0, "covariance scale must be positive");
  PredictedHumanTrajectory out = prediction;
  for (auto& track : out.tracks) {
    for (auto& g : track) g.cov *= factor;
  }
  return out;
}

PredictedHumanTrajectory with_identity_covariance(const PredictedHumanTrajectory& prediction) {
  PredictedHumanTrajectory out = prediction;
  for (auto& track : out.tracks) {
    for (auto& g : track) g.cov = Mat3::Identity();
  }
  return out;
}

}  // namespace comoto
