#pragma once

// Multi-goal anytime bidirectional planner: a start tree and a goal forest
// rooted at every goal configuration grow toward each other (extend/connect
// with parent selection and rewiring). Each cheaper connection is shortcut
// and becomes the incumbent; later samples are drawn from the informed set.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "redugoal/collision.hpp"
#include "redugoal/ik.hpp"
#include "redugoal/kinematics.hpp"
#include "redugoal/nearest.hpp"
#include "redugoal/timing.hpp"

namespace redugoal {

/// Planner iterations per millisecond of nominal budget.
inline constexpr double kDefaultCalibration = 8.0;

/// REDUGOAL_CALIBRATION, when set to a positive number, replaces the default.
inline double calibration_constant() {
  if (const char* env = std::getenv("REDUGOAL_CALIBRATION")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return kDefaultCalibration;
}

inline JointDynamics default_ur5_dynamics(std::size_t dof = 6) {
  return JointDynamics::uniform(dof, kPi, kTwoPi);
}

struct PlannerConfig {
  double time_budget_ms = 1000.0;
  double extend_step = 0.2;
  double edge_check_step = kDefaultEdgeStep;
  std::uint64_t seed = 1;
  int shortcut_attempts_per_round = 100;
  bool informed_sampling = true;
  double trace_resolution_ms = 0.0;
  double calibration = calibration_constant();
  NeighborStructure neighbors = NeighborStructure::linear;
  /// Empty means default_ur5_dynamics.
  JointDynamics dynamics;

  void validate() const {
    if (!(time_budget_ms > 0.0)) throw ArgumentError("time_budget must be > 0");
    if (!(extend_step > 0.0)) throw ArgumentError("extend_step must be > 0");
    if (!(edge_check_step > 0.0)) throw ArgumentError("edge_check_step must be > 0");
    if (!(calibration > 0.0)) throw ArgumentError("calibration must be > 0");
    if (shortcut_attempts_per_round < 0) throw ArgumentError("shortcut attempts must be >= 0");
    if (trace_resolution_ms < 0.0) throw ArgumentError("trace_resolution must be >= 0");
  }

  std::uint64_t iteration_budget() const {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(time_budget_ms * calibration)));
  }
};

struct Path {
  std::vector<Configuration> waypoints;
};

inline double path_length(const Path& path) {
  double s = 0.0;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) s += config_distance(path.waypoints[i - 1], path.waypoints[i]);
  return s;
}

inline double execution_time(const Path& path, const JointDynamics& dyn) {
  return execution_time(std::span<const Configuration>(path.waypoints), dyn);
}

struct TraceEntry {
  double elapsed_ms = 0.0;  // nominal: iteration / calibration
  double length = 0.0;
  std::size_t goal_rank = 0;
  double exec_time = 0.0;
};

struct PlanResult {
  Path path;
  double length = std::numeric_limits<double>::infinity();
  double exec_time = std::numeric_limits<double>::infinity();
  std::size_t goal_rank = 0;
  std::size_t goal_index = 0;
  std::vector<TraceEntry> trace;
  bool success = false;
  std::uint64_t seed = 0;
  double calibration = 0.0;
  std::uint64_t iterations = 0;
  std::size_t start_nodes = 0;
  std::size_t goal_nodes = 0;
  double elapsed_ms = 0.0;  // nominal time of the final improvement
  double wall_ms = 0.0;     // reported only, never gates behavior
  std::string message;
};

/// Samples the union of prolate hyperspheroids {x : |x-s| + |x-g| <= c} over
/// goals g with |s-g| <= c, restricted to joint limits. Uniform over the union.
class InformedSampler {
 public:
  InformedSampler(const KinematicChain& chain, Configuration start, std::vector<Configuration> goals)
      : chain_(chain), start_(std::move(start)), goals_(std::move(goals)) {
    for (const auto& g : goals_) goal_dist_.push_back(config_distance(start_, g));
  }

  Configuration uniform(std::mt19937_64& rng) const {
    Configuration q(chain_.dof());
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto& j = chain_.joint(i);
      std::uniform_real_distribution<double> u(j.limit_lo, j.limit_hi);
      q[i] = u(rng);
      if (q[i] >= j.limit_hi) q[i] = j.limit_lo;
    }
    return q;
  }

  bool in_union(const Configuration& x, double cost) const { return cover_count(x, cost) > 0; }

  Configuration sample(double best_cost, std::mt19937_64& rng) {
    if (!std::isfinite(best_cost)) return uniform(rng);
    refresh(best_cost);
    if (admissible_.empty()) return uniform(rng);
    const std::size_t dim = start_.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double pick = unit(rng) * weight_sum_;
      const std::size_t k = static_cast<std::size_t>(
          std::upper_bound(cumulative_.begin(), cumulative_.end(), pick) - cumulative_.begin());
      const std::size_t g = admissible_[std::min(k, admissible_.size() - 1)];
      Configuration x = sample_ellipsoid(goals_[g], goal_dist_[g], best_cost, dim, rng);
      if (!within_limits(chain_, x)) continue;
      const int cover = cover_count(x, best_cost);
      if (cover == 0) continue;
      if (cover > 1 && unit(rng) * cover >= 1.0) continue;
      return x;
    }
    // The start-goal segment lies inside both the ellipsoid and the limits.
    const std::size_t g = admissible_[static_cast<std::size_t>(unit(rng) * admissible_.size()) % admissible_.size()];
    return interpolate(start_, goals_[g], unit(rng));
  }

 private:
  void refresh(double cost) {
    if (cost == cached_cost_) return;
    cached_cost_ = cost;
    admissible_.clear();
    cumulative_.clear();
    weight_sum_ = 0.0;
    const double dim = static_cast<double>(start_.size());
    for (std::size_t g = 0; g < goals_.size(); ++g) {
      if (goal_dist_[g] > cost) continue;
      // Volume up to a shared constant.
      const double w = cost * std::pow(std::max(0.0, cost * cost - goal_dist_[g] * goal_dist_[g]), (dim - 1.0) / 2.0);
      admissible_.push_back(g);
      weight_sum_ += std::max(w, 1e-300);
      cumulative_.push_back(weight_sum_);
    }
  }

  int cover_count(const Configuration& x, double cost) const {
    int n = 0;
    const double ds = config_distance(x, start_);
    for (std::size_t g = 0; g < goals_.size(); ++g) {
      if (goal_dist_[g] > cost) continue;
      if (ds + config_distance(x, goals_[g]) <= cost) ++n;
    }
    return n;
  }

  Configuration sample_ellipsoid(const Configuration& goal, double c_min, double c_max, std::size_t dim,
                                 std::mt19937_64& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> y(dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : y) {
        v = normal(rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / std::sqrt(norm);
    const double major = c_max / 2.0;
    const double minor = std::sqrt(std::max(0.0, c_max * c_max - c_min * c_min)) / 2.0;
    for (std::size_t i = 0; i < dim; ++i) y[i] *= radius * (i == 0 ? major : minor);

    // Householder reflection taking e1 onto the start->goal direction.
    std::vector<double> v(dim, 0.0);
    if (c_min > 0.0) {
      for (std::size_t i = 0; i < dim; ++i) v[i] = -(goal[i] - start_[i]) / c_min;
      v[0] += 1.0;
    }
    const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    if (vv > 1e-24) {
      const double vy = std::inner_product(v.begin(), v.end(), y.begin(), 0.0);
      for (std::size_t i = 0; i < dim; ++i) y[i] -= 2.0 * v[i] * vy / vv;
    }
    Configuration x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = 0.5 * (start_[i] + goal[i]) + y[i];
    return x;
  }

  const KinematicChain& chain_;
  Configuration start_;
  std::vector<Configuration> goals_;
  std::vector<double> goal_dist_;
  double cached_cost_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::size_t> admissible_;
  std::vector<double> cumulative_;
  double weight_sum_ = 0.0;
};

inline Configuration informed_sample(const KinematicChain& chain, const Configuration& start, const GoalSet& goals,
                                     double best_cost, std::mt19937_64& rng) {
  if (!(best_cost > 0.0)) throw ArgumentError("best_cost must be > 0");
  InformedSampler sampler(chain, start, goals.configs());
  return sampler.sample(best_cost, rng);
}

namespace detail {

/// Removes consecutive repeats; the final waypoint is kept bit-exact.
inline void drop_duplicate_waypoints(std::vector<Configuration>& w) {
  if (w.size() <= 2) return;
  std::vector<Configuration> out{w.front()};
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (config_distance(out.back(), w[i]) > 1e-12) {
      out.push_back(std::move(w[i]));
    } else if (i + 1 == w.size()) {
      if (out.size() == 1) out.push_back(std::move(w[i]));
      else out.back() = std::move(w[i]);
    }
  }
  w = std::move(out);
}

inline Path shortcut_with(const Path& path, const CollisionChecker& checker, int attempts, double step,
                          std::mt19937_64& rng) {
  Path out = path;
  auto& w = out.waypoints;
  CollisionChecker::Workspace ws;
  std::vector<double> cum;
  for (int a = 0; a < attempts && w.size() > 2; ++a) {
    cum.assign(1, 0.0);
    for (std::size_t i = 1; i < w.size(); ++i) cum.push_back(cum.back() + config_distance(w[i - 1], w[i]));
    const double total = cum.back();
    if (a % 2 == 0) {
      std::uniform_int_distribution<std::size_t> first(0, w.size() - 3);
      const std::size_t i = first(rng);
      std::uniform_int_distribution<std::size_t> second(i + 2, w.size() - 1);
      const std::size_t j = second(rng);
      const double direct = config_distance(w[i], w[j]);
      if (!(direct < cum[j] - cum[i] - 1e-12)) continue;
      if (checker.edge_in_collision(w[i], w[j], step, ws, true, true)) continue;
      w.erase(w.begin() + static_cast<std::ptrdiff_t>(i + 1), w.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double s1 = u(rng), s2 = u(rng);
      if (s1 > s2) std::swap(s1, s2);
      auto segment_of = [&](double s) {
        const auto it = std::upper_bound(cum.begin(), cum.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - cum.begin());
        return std::min(k == 0 ? 0 : k - 1, w.size() - 2);
      };
      const std::size_t i1 = segment_of(s1), i2 = segment_of(s2);
      if (i1 == i2) continue;
      auto point_at = [&](std::size_t seg, double s) {
        const double len = cum[seg + 1] - cum[seg];
        const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
        return interpolate(w[seg], w[seg + 1], t);
      };
      Configuration p1 = point_at(i1, s1), p2 = point_at(i2, s2);
      const double before = config_distance(p1, w[i1 + 1]) + (cum[i2] - cum[i1 + 1]) + config_distance(w[i2], p2);
      if (!(config_distance(p1, p2) < before - 1e-12)) continue;
      std::vector<Configuration> next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i1 + 1));
      next.push_back(p1);
      next.push_back(p2);
      next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(i2 + 1), w.end());
      detail::drop_duplicate_waypoints(next);
      if (!(path_length(Path{next}) < total - 1e-12)) continue;
      // Sub-segments of validated edges need their own samples at this step.
      if (checker.edge_in_collision(w[i1], p1, step, ws, true, false)) continue;
      if (checker.edge_in_collision(p1, p2, step, ws, true, false)) continue;
      if (checker.edge_in_collision(p2, w[i2 + 1], step, ws, true, true)) continue;
      w = std::move(next);
    }
  }
  return out;
}

}  // namespace detail

/// Replaces sub-paths by straight segments when collision-free and shorter.
/// Endpoints are preserved and the result is never longer.
inline Path shortcut(const Path& path, const Scene& scene, const RobotGeometry& robot, const KinematicChain& chain,
                     int attempts, double step, std::uint64_t seed) {
  if (path.waypoints.size() <= 2) return path;
  CollisionChecker checker(scene, robot, chain);
  std::mt19937_64 rng(seed);
  return detail::shortcut_with(path, checker, attempts, step, rng);
}

namespace detail {

class SearchTree {
 public:
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  struct Node {
    Configuration q;
    std::size_t parent = kNoParent;
    double cost = 0.0;
    std::size_t root = 0;  // caller-defined id of the root this node descends from
    std::vector<std::size_t> children;
  };

  SearchTree(NeighborStructure structure, std::size_t dim) : nn_(make_nearest(structure, dim)) {}

  std::size_t add_root(const Configuration& q, std::size_t root_id) {
    nodes_.push_back(Node{q, kNoParent, 0.0, root_id, {}});
    nn_->add(q.view());
    return nodes_.size() - 1;
  }

  std::size_t add(const Configuration& q, std::size_t parent, double edge) {
    nodes_.push_back(Node{q, parent, nodes_[parent].cost + edge, nodes_[parent].root, {}});
    nodes_[parent].children.push_back(nodes_.size() - 1);
    nn_->add(q.view());
    return nodes_.size() - 1;
  }

  void reparent(std::size_t node, std::size_t parent, double edge) {
    auto& old_children = nodes_[nodes_[node].parent].children;
    old_children.erase(std::find(old_children.begin(), old_children.end(), node));
    nodes_[node].parent = parent;
    nodes_[parent].children.push_back(node);
    const double delta = nodes_[parent].cost + edge - nodes_[node].cost;
    const std::size_t root = nodes_[parent].root;
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      nodes_[n].cost += delta;
      nodes_[n].root = root;
      stack.insert(stack.end(), nodes_[n].children.begin(), nodes_[n].children.end());
    }
  }

  std::vector<Configuration> branch(std::size_t node) const {
    std::vector<Configuration> out;
    for (std::size_t n = node; n != kNoParent; n = nodes_[n].parent) out.push_back(nodes_[n].q);
    return out;  // node first, root last
  }

  const Node& operator[](std::size_t i) const { return nodes_[i]; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const NearestNeighbors& index() const { return *nn_; }

 private:
  std::vector<Node> nodes_;
  std::unique_ptr<NearestNeighbors> nn_;
};

}  // namespace detail

/// Anytime multi-goal search. Deterministic for fixed inputs: the budget is
/// an iteration count, time_budget_ms * calibration.
class MultiGoalPlanner {
 public:
  MultiGoalPlanner(const Scene& scene, const RobotGeometry& robot, const KinematicChain& chain)
      : checker_(scene, robot, chain), chain_(chain) {}

  PlanResult plan(const Configuration& start, const GoalSet& goals, const PlannerConfig& cfg) const {
    cfg.validate();
    require_within_limits(chain_, start);
    if (goals.empty()) throw ArgumentError("goal set is empty");
    const auto wall_start = std::chrono::steady_clock::now();
    Run run(*this, start, goals, cfg);
    PlanResult result = run.execute();
    result.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
  }

 private:
  class Run {
   public:
    Run(const MultiGoalPlanner& owner, const Configuration& start, const GoalSet& goals, const PlannerConfig& cfg)
        : checker_(owner.checker_),
          chain_(owner.chain_),
          start_(start),
          goals_(goals),
          cfg_(cfg),
          dyn_(cfg.dynamics.v_max.empty() ? default_ur5_dynamics(chain_.dof()) : cfg.dynamics),
          rng_(cfg.seed),
          start_tree_(cfg.neighbors, chain_.dof()),
          goal_tree_(cfg.neighbors, chain_.dof()) {
      dyn_.validate(chain_.dof());
      result_.seed = cfg.seed;
      result_.calibration = cfg.calibration;
    }

    PlanResult execute() {
      if (checker_.in_collision(start_, ws_)) throw PreconditionError("start configuration is in collision");

      std::vector<Configuration> valid_goals;
      for (std::size_t g = 0; g < goals_.size(); ++g) {
        const auto& q = goals_.configs()[g];
        if (q.size() != chain_.dof()) throw ArgumentError("goal dimension mismatch");
        if (!within_limits(chain_, q) || checker_.in_collision(q, ws_)) continue;
        if (config_distance(start_, q) <= 1e-12) return trivial(g);
        goal_tree_.add_root(q, g);
        valid_goals.push_back(q);
      }
      if (goal_tree_.size() == 0) {
        result_.message = "no collision-free goal configuration";
        return result_;
      }
      start_tree_.add_root(start_, 0);
      sampler_.emplace(chain_, start_, valid_goals);

      const std::uint64_t budget = cfg_.iteration_budget();
      // Straight shot from the goal forest toward the start before sampling.
      {
        const auto c = connect(goal_tree_, start_);
        if (c.reached) consider(0, c.node, 0);
      }
      for (std::uint64_t it = 0; it < budget; ++it) {
        const bool start_grows = it % 2 == 0;
        auto& grow = start_grows ? start_tree_ : goal_tree_;
        auto& other = start_grows ? goal_tree_ : start_tree_;
        const Configuration target = cfg_.informed_sampling ? sampler_->sample(best_cost_, rng_)
                                                            : sampler_->uniform(rng_);
        const auto e = extend(grow, target);
        if (!e.added) continue;
        const auto c = connect(other, grow[e.node].q);
        if (!c.reached) continue;
        if (start_grows) consider(e.node, c.node, it + 1);
        else consider(c.node, e.node, it + 1);
      }
      result_.iterations = budget;
      result_.start_nodes = start_tree_.size();
      result_.goal_nodes = goal_tree_.size();
      if (!result_.success) result_.message = "budget exhausted without a solution";
      return result_;
    }

   private:
    struct Step {
      bool added = false;
      bool reached = false;
      std::size_t node = 0;
    };

    PlanResult trivial(std::size_t g) {
      result_.path.waypoints = {start_, goals_.configs()[g]};
      result_.length = path_length(result_.path);
      result_.exec_time = execution_time(result_.path, dyn_);
      result_.goal_index = g;
      result_.goal_rank = goals_.rank_of(g);
      result_.success = true;
      result_.trace.push_back({0.0, result_.length, result_.goal_rank, result_.exec_time});
      return result_;
    }

    std::size_t neighbor_count(std::size_t n) const {
      const double d = static_cast<double>(chain_.dof());
      const double k_rrt = std::exp(1.0) * (1.0 + 1.0 / d);
      return static_cast<std::size_t>(std::ceil(k_rrt * std::log(static_cast<double>(n) + 1.0)));
    }

    Configuration steer(const Configuration& from, const Configuration& to) const {
      const double d = config_distance(from, to);
      if (d <= cfg_.extend_step) return to;
      return interpolate(from, to, cfg_.extend_step / d);
    }

    bool edge_free(const Configuration& a, const Configuration& b) {
      return !checker_.edge_in_collision(a, b, cfg_.edge_check_step, ws_, true, true);
    }

    /// Adds q (already known collision-free) with the cheapest valid parent
    /// among its neighbors, then rewires neighbors through it.
    std::size_t insert(detail::SearchTree& tree, const Configuration& q, std::size_t near) {
      const auto neighbors = tree.index().k_nearest(q.view(), neighbor_count(tree.size()));
      std::size_t parent = near;
      double parent_edge = config_distance(tree[near].q, q);
      double best = tree[near].cost + parent_edge;

      std::vector<std::pair<double, std::size_t>> ranked;
      for (auto n : neighbors) {
        if (n == near) continue;
        const double via = tree[n].cost + config_distance(tree[n].q, q);
        if (via < best - 1e-12) ranked.emplace_back(via, n);
      }
      std::sort(ranked.begin(), ranked.end());
      for (const auto& [via, n] : ranked) {
        if (edge_free(tree[n].q, q)) {
          parent = n;
          parent_edge = config_distance(tree[n].q, q);
          best = via;
          break;
        }
      }
      const std::size_t added = tree.add(q, parent, parent_edge);
      for (auto n : neighbors) {
        if (n == parent || tree[n].parent == detail::SearchTree::kNoParent) continue;
        const double edge = config_distance(q, tree[n].q);
        if (tree[added].cost + edge < tree[n].cost - 1e-12 && edge_free(q, tree[n].q)) tree.reparent(n, added, edge);
      }
      return added;
    }

    Step extend(detail::SearchTree& tree, const Configuration& target) {
      const std::size_t near = tree.index().nearest(target.view());
      const Configuration q = steer(tree[near].q, target);
      if (config_distance(q, tree[near].q) <= 1e-12) return {};
      if (!within_limits(chain_, q)) return {};
      if (!checker_.edge_in_collision(tree[near].q, q, cfg_.edge_check_step, ws_, true, false)) {
        const std::size_t node = insert(tree, q, near);
        return {true, q == target, node};
      }
      // Blocked: keep the longest collision-free prefix of the step.
      const auto partial = free_prefix(tree[near].q, q);
      if (!partial) return {};
      return {true, false, insert(tree, *partial, near)};
    }

    std::optional<Configuration> free_prefix(const Configuration& from, const Configuration& to) {
      const double d = config_distance(from, to);
      const auto n = static_cast<std::size_t>(std::ceil(d / cfg_.edge_check_step));
      std::size_t last = 0;
      Configuration q(from.size());
      for (std::size_t i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n);
        for (std::size_t j = 0; j < q.size(); ++j) q[j] = from[j] + (to[j] - from[j]) * t;
        if (checker_.in_collision(q, ws_)) break;
        last = i;
      }
      if (last == 0) return std::nullopt;
      q = interpolate(from, to, static_cast<double>(last) / static_cast<double>(n));
      if (checker_.edge_in_collision(from, q, cfg_.edge_check_step, ws_, true, true)) return std::nullopt;
      return q;
    }

    Step connect(detail::SearchTree& tree, const Configuration& target) {
      Step last;
      while (true) {
        const auto s = extend(tree, target);
        if (!s.added) return last;
        last = s;
        if (s.reached) return last;
      }
    }

    /// Both nodes hold the same configuration.
    void consider(std::size_t start_node, std::size_t goal_node, std::uint64_t iteration) {
      const double raw = start_tree_[start_node].cost + goal_tree_[goal_node].cost;
      if (!(raw < best_cost_ - 1e-12)) return;

      auto head = start_tree_.branch(start_node);
      std::reverse(head.begin(), head.end());
      const auto tail = goal_tree_.branch(goal_node);
      Path raw_path;
      raw_path.waypoints = std::move(head);
      raw_path.waypoints.insert(raw_path.waypoints.end(), tail.begin() + 1, tail.end());
      if (raw_path.waypoints.size() == 1) raw_path.waypoints.push_back(tail.front());
      detail::drop_duplicate_waypoints(raw_path.waypoints);

      Path path = detail::shortcut_with(raw_path, checker_, cfg_.shortcut_attempts_per_round,
                                        cfg_.edge_check_step, rng_);
      const double length = path_length(path);
      if (!(length < best_cost_ - 1e-12)) return;

      best_cost_ = length;
      const std::size_t g = goal_tree_[goal_node].root;
      result_.path = std::move(path);
      result_.length = length;
      result_.exec_time = execution_time(result_.path, dyn_);
      result_.goal_index = g;
      result_.goal_rank = goals_.rank_of(g);
      result_.success = true;
      result_.elapsed_ms = static_cast<double>(iteration) / cfg_.calibration;
      TraceEntry entry{result_.elapsed_ms, length, result_.goal_rank, result_.exec_time};
      if (cfg_.trace_resolution_ms > 0.0 && !result_.trace.empty() &&
          std::floor(result_.trace.back().elapsed_ms / cfg_.trace_resolution_ms) ==
              std::floor(entry.elapsed_ms / cfg_.trace_resolution_ms)) {
        result_.trace.back() = entry;
      } else {
        result_.trace.push_back(entry);
      }
    }

    const CollisionChecker& checker_;
    const KinematicChain& chain_;
    const Configuration& start_;
    const GoalSet& goals_;
    const PlannerConfig& cfg_;
    JointDynamics dyn_;
    std::mt19937_64 rng_;
    detail::SearchTree start_tree_;
    detail::SearchTree goal_tree_;
    std::optional<InformedSampler> sampler_;
    CollisionChecker::Workspace ws_;
    double best_cost_ = std::numeric_limits<double>::infinity();
    PlanResult result_;
  };

  CollisionChecker checker_;
  KinematicChain chain_;
};

inline PlanResult plan(const Scene& scene, const RobotGeometry& robot, const KinematicChain& chain,
                       const Configuration& start, const GoalSet& goals, const PlannerConfig& cfg) {
  return MultiGoalPlanner(scene, robot, chain).plan(start, goals, cfg);
}

}  // namespace redugoal
