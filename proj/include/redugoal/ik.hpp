#pragma once

// Closed-form inverse kinematics for UR-class 6R arms and construction of
// ranked goal sets (every distinct arm pose, expanded by whole-turn shifts).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "redugoal/kinematics.hpp"

namespace redugoal {

enum class OrientationMode { fixed, free_about_tool_axis };

struct TaskGoal {
  Pose target;
  OrientationMode orientation_mode = OrientationMode::fixed;
  int max_distinct_poses = 8;
};

/// Goal configurations ranked by joint-space distance to a start.
/// Rank 1 is the closest; ties keep insertion order.
class GoalSet {
 public:
  GoalSet() = default;
  GoalSet(Configuration start, std::vector<Configuration> configs)
      : start_(std::move(start)), configs_(std::move(configs)) {
    distances_.reserve(configs_.size());
    for (const auto& c : configs_) distances_.push_back(config_distance(start_, c));
    by_rank_.resize(configs_.size());
    std::iota(by_rank_.begin(), by_rank_.end(), std::size_t{0});
    std::stable_sort(by_rank_.begin(), by_rank_.end(),
                     [&](std::size_t a, std::size_t b) { return distances_[a] < distances_[b]; });
    rank_of_.resize(configs_.size());
    for (std::size_t r = 0; r < by_rank_.size(); ++r) rank_of_[by_rank_[r]] = r + 1;
  }

  const Configuration& start() const noexcept { return start_; }
  const std::vector<Configuration>& configs() const noexcept { return configs_; }
  std::size_t size() const noexcept { return configs_.size(); }
  bool empty() const noexcept { return configs_.empty(); }

  /// 1-based rank of the config stored at `index`.
  std::size_t rank_of(std::size_t index) const { return rank_of_.at(index); }
  const Configuration& ranked(std::size_t rank) const { return configs_.at(by_rank_.at(rank - 1)); }
  const std::vector<std::size_t>& by_rank() const noexcept { return by_rank_; }
  double distance(std::size_t index) const { return distances_.at(index); }

  /// Rank of the member equal to q (per-coordinate tolerance), if any.
  std::optional<std::size_t> rank_of(const Configuration& q, double tol = 1e-12) const {
    for (std::size_t i = 0; i < configs_.size(); ++i) {
      if (configs_[i].size() != q.size()) continue;
      bool same = true;
      for (std::size_t j = 0; j < q.size() && same; ++j) same = std::abs(configs_[i][j] - q[j]) <= tol;
      if (same) return rank_of_[i];
    }
    return std::nullopt;
  }

 private:
  Configuration start_;
  std::vector<Configuration> configs_;
  std::vector<double> distances_;
  std::vector<std::size_t> by_rank_;
  std::vector<std::size_t> rank_of_;
};

/// Lowest in-limit representative of angle modulo 2pi, if one exists.
inline std::optional<double> wrap_into_limits(const JointModel& joint, double angle) {
  double a = std::remainder(angle, kTwoPi);
  const double k = std::ceil((joint.limit_lo - a) / kTwoPi);
  double v = a + k * kTwoPi;
  if (v < joint.limit_lo) v += kTwoPi;
  if (v - kTwoPi >= joint.limit_lo) v -= kTwoPi;
  if (!joint.contains(v)) return std::nullopt;
  return v;
}

struct UrGeometry {
  double d1, a2, a3, d4, d5, d6;
  std::array<double, 6> theta_offsets;
};

/// Recognises the UR joint layout: shoulder pan, three parallel pitch axes,
/// then two perpendicular wrist axes.
inline std::optional<UrGeometry> ur_geometry(const KinematicChain& chain) {
  if (chain.dof() != 6) return std::nullopt;
  constexpr double tol = 1e-9;
  auto near = [](double x, double v) { return std::abs(x - v) <= tol; };
  const auto& j = chain.joints();
  const bool layout = near(j[0].dh.a, 0) && near(j[0].dh.alpha, kPi / 2) &&
                      near(j[1].dh.d, 0) && near(j[1].dh.alpha, 0) && !near(j[1].dh.a, 0) &&
                      near(j[2].dh.d, 0) && near(j[2].dh.alpha, 0) && !near(j[2].dh.a, 0) &&
                      near(j[3].dh.a, 0) && near(j[3].dh.alpha, kPi / 2) &&
                      near(j[4].dh.a, 0) && near(j[4].dh.alpha, -kPi / 2) &&
                      near(j[5].dh.a, 0) && near(j[5].dh.alpha, 0);
  if (!layout) return std::nullopt;
  UrGeometry g{j[0].dh.d, j[1].dh.a, j[2].dh.a, j[3].dh.d, j[4].dh.d, j[5].dh.d, {}};
  for (std::size_t i = 0; i < 6; ++i) g.theta_offsets[i] = j[i].dh.theta_offset;
  return g;
}

inline constexpr double kIkPositionTol = 1e-6;
inline constexpr double kIkRotationTol = 1e-6;
inline constexpr double kWristSingularTol = 1e-8;

/// All closed-form solutions (at most 8), wrapped into joint limits and
/// verified by forward kinematics. Unreachable targets give an empty list.
/// When the wrist is singular the free joint-6 angle is pinned to zero.
inline std::vector<Configuration> analytic_ik_6r(const KinematicChain& chain, const Pose& target) {
  const auto geo = ur_geometry(chain);
  if (!geo) throw UnsupportedChainError("chain '" + chain.name() + "' is not a UR-class 6R arm");
  const auto& [d1, a2, a3, d4, d5, d6, offsets] = *geo;

  const Eigen::Isometry3d flange =
      chain.base_frame().inverse() * target.to_isometry() * chain.tool_frame().inverse();
  const Eigen::Matrix3d rot = flange.linear();
  const Eigen::Vector3d p05 = flange.translation() - d6 * rot.col(2);

  std::vector<Configuration> out;
  const double r = std::hypot(p05.x(), p05.y());
  if (r < std::abs(d4) || r == 0.0) return out;
  const double psi = std::atan2(p05.y(), p05.x());
  const double shoulder = std::asin(std::clamp(d4 / r, -1.0, 1.0));

  auto rot_z = [](double t) { return Eigen::AngleAxisd(t, Eigen::Vector3d::UnitZ()).toRotationMatrix(); };
  auto rot_y = [](double t) { return Eigen::AngleAxisd(t, Eigen::Vector3d::UnitY()).toRotationMatrix(); };
  const Eigen::Matrix3d rx90 = Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitX()).toRotationMatrix();

  for (const double th1 : {psi + shoulder, psi + kPi - shoulder}) {
    const Eigen::Matrix3d r01 = rot_z(th1) * rx90;
    // Frame-1 view of the wrist: m = Rz(th234) * Ry(-th5) * Rz(th6).
    const Eigen::Matrix3d m = r01.transpose() * rot;
    const double c5 = std::clamp(m(2, 2), -1.0, 1.0);
    const Eigen::Vector3d p15 = r01.transpose() * (p05 - Eigen::Vector3d(0, 0, d1));

    for (const double th5 : {std::acos(c5), -std::acos(c5)}) {
      const double s5 = std::sin(th5);
      double th6 = 0.0;
      if (std::abs(s5) >= kWristSingularTol) th6 = std::atan2(-m(2, 1) / s5, m(2, 0) / s5);
      const Eigen::Matrix3d rz234 = m * rot_z(-th6) * rot_y(th5);
      const double th234 = std::atan2(rz234(1, 0), rz234(0, 0));
      // Joint-5 axis in frame 1 is Rz(th234) * (0, -1, 0).
      const Eigen::Vector3d axis5(std::sin(th234), -std::cos(th234), 0.0);
      const Eigen::Vector3d p14 = p15 - d5 * axis5;

      const double c3 = (p14.x() * p14.x() + p14.y() * p14.y() - a2 * a2 - a3 * a3) / (2.0 * a2 * a3);
      if (std::abs(c3) > 1.0 + 1e-9) continue;
      const double elbow = std::acos(std::clamp(c3, -1.0, 1.0));

      for (const double th3 : {elbow, -elbow}) {
        const double th2 = std::atan2(p14.y(), p14.x()) -
                           std::atan2(a3 * std::sin(th3), a2 + a3 * std::cos(th3));
        const double th4 = th234 - th2 - th3;
        const std::array<double, 6> theta{th1, th2, th3, th4, th5, th6};

        Configuration q(6);
        bool ok = true;
        for (std::size_t i = 0; i < 6 && ok; ++i) {
          const auto w = wrap_into_limits(chain.joint(i), theta[i] - offsets[i]);
          if (!w) ok = false;
          else q[i] = *w;
        }
        if (!ok) continue;
        const auto [dp, dr] = pose_error(forward_kinematics(chain, q), target);
        if (dp > kIkPositionTol || dr > kIkRotationTol) continue;
        out.push_back(std::move(q));
      }
    }
  }
  return out;
}

/// Two configurations give the same arm pose iff every link frame coincides.
inline bool same_pose(const KinematicChain& chain, const Configuration& a, const Configuration& b,
                      double tol = 1e-9) {
  const auto fa = link_frames(chain, a);
  const auto fb = link_frames(chain, b);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if ((fa[i].translation() - fb[i].translation()).norm() > tol) return false;
    if ((fa[i].linear() - fb[i].linear()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

using ConfigPredicate = std::function<bool(const Configuration&)>;

/// Number of tool-axis roll angles tried for free-orientation goals.
inline constexpr int kRollGridSize = 32;

/// Distinct-pose IK solutions for a task goal. Free-orientation goals walk a
/// 32-point roll grid (phase derived from `seed`) until enough poses are found.
/// `accept`, when set, filters solutions before they count (e.g. collision).
inline std::vector<Configuration> distinct_pose_solutions(const KinematicChain& chain,
                                                          const TaskGoal& goal,
                                                          std::uint64_t seed = 0,
                                                          const ConfigPredicate& accept = {}) {
  if (goal.max_distinct_poses < 1) throw ArgumentError("max_distinct_poses must be >= 1");
  std::vector<Configuration> poses;
  auto take = [&](const Pose& target) {
    for (auto& q : analytic_ik_6r(chain, target)) {
      if (static_cast<int>(poses.size()) >= goal.max_distinct_poses) return;
      if (accept && !accept(q)) continue;
      const bool dup = std::any_of(poses.begin(), poses.end(),
                                   [&](const Configuration& p) { return same_pose(chain, p, q); });
      if (!dup) poses.push_back(std::move(q));
    }
  };

  if (goal.orientation_mode == OrientationMode::fixed) {
    take(goal.target);
    return poses;
  }
  double phase = 0.0;
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    phase = std::uniform_real_distribution<double>(0.0, kTwoPi / kRollGridSize)(rng);
  }
  for (int j = 0; j < kRollGridSize && static_cast<int>(poses.size()) < goal.max_distinct_poses; ++j) {
    const double roll = phase + kTwoPi * j / kRollGridSize;
    Pose rolled = goal.target;
    rolled.orientation = (goal.target.orientation * Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ())).normalized();
    take(rolled);
  }
  return poses;
}

/// Inverse solutions for the task, each expanded to all of its equivalent
/// configurations, deduplicated and ranked against `start`.
inline GoalSet compute_goal_configurations(const KinematicChain& chain, const TaskGoal& goal,
                                           const Configuration& start, std::uint64_t seed = 0,
                                           const ConfigPredicate& accept = {}) {
  require_within_limits(chain, start);
  std::vector<Configuration> configs;
  for (const auto& pose : distinct_pose_solutions(chain, goal, seed, accept)) {
    for (auto& e : equivalent_configurations(chain, pose)) {
      const bool dup = std::any_of(configs.begin(), configs.end(), [&](const Configuration& c) {
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (std::abs(c[i] - e[i]) > 1e-12) return false;
        }
        return true;
      });
      if (!dup) configs.push_back(std::move(e));
    }
  }
  return GoalSet(start, std::move(configs));
}

enum class SelectionStrategy { random, closest };

inline std::string to_string(SelectionStrategy s) {
  return s == SelectionStrategy::random ? "random" : "closest";
}

inline SelectionStrategy parse_strategy(const std::string& s) {
  if (s == "random") return SelectionStrategy::random;
  if (s == "closest") return SelectionStrategy::closest;
  throw ArgumentError("unknown goal selection strategy '" + s + "'");
}

/// k goals by rank (closest) or drawn without replacement (random), re-ranked.
inline GoalSet select_goals(const GoalSet& set, int k, SelectionStrategy strategy, std::uint64_t seed) {
  if (set.empty()) throw DomainError("cannot select goals from an empty goal set");
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (static_cast<std::size_t>(k) >= set.size()) return set;

  std::vector<std::size_t> picked;
  if (strategy == SelectionStrategy::closest) {
    picked.assign(set.by_rank().begin(), set.by_rank().begin() + k);
  } else {
    std::vector<std::size_t> pool = set.by_rank();
    std::mt19937_64 rng(seed);
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
    }
    picked.assign(pool.begin(), pool.begin() + k);
  }
  std::vector<Configuration> configs;
  configs.reserve(picked.size());
  for (auto i : picked) configs.push_back(set.configs()[i]);
  return GoalSet(set.start(), std::move(configs));
}

}  // namespace redugoal
