#pragma once

// Execution-time model: every segment is a synchronized rest-to-rest move,
// each joint following a trapezoidal (or triangular) velocity profile.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "redugoal/kinematics.hpp"

namespace redugoal {

struct JointDynamics {
  std::vector<double> v_max;  // rad/s
  std::vector<double> a_max;  // rad/s^2

  static JointDynamics uniform(std::size_t dof, double v, double a) {
    return {std::vector<double>(dof, v), std::vector<double>(dof, a)};
  }

  void validate(std::size_t dof) const {
    if (v_max.size() != dof || a_max.size() != dof) throw ArgumentError("dynamics size does not match dof");
    for (std::size_t i = 0; i < dof; ++i) {
      if (!(v_max[i] > 0.0) || !(a_max[i] > 0.0)) throw ArgumentError("dynamics limits must be > 0");
    }
  }
};

/// Rest-to-rest time for one joint moving |delta| radians.
inline double joint_move_time(double delta, double v_max, double a_max) {
  const double dist = std::abs(delta);
  if (dist == 0.0) return 0.0;
  if (dist * a_max >= v_max * v_max) return dist / v_max + v_max / a_max;
  return 2.0 * std::sqrt(dist / a_max);
}

/// Slowest joint sets the segment time.
inline double segment_time(std::span<const double> delta, const JointDynamics& dyn) {
  dyn.validate(delta.size());
  double t = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) t = std::max(t, joint_move_time(delta[i], dyn.v_max[i], dyn.a_max[i]));
  return t;
}

inline double execution_time(std::span<const Configuration> waypoints, const JointDynamics& dyn) {
  double total = 0.0;
  std::vector<double> delta;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const auto& a = waypoints[i - 1];
    const auto& b = waypoints[i];
    if (a.size() != b.size()) throw ArgumentError("waypoint dimension mismatch");
    delta.resize(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) delta[j] = b[j] - a[j];
    total += segment_time(delta, dyn);
  }
  return total;
}

}  // namespace redugoal
