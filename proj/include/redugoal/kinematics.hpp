#pragma once

// Serial-arm model: revolute joints described by standard (distal) DH rows,
// forward kinematics, the joint-space metric and enumeration of equivalent
// configurations (same link poses, joint values shifted by whole turns).

#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "redugoal/errors.hpp"

namespace redugoal {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Joint-space point, radians.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<double> angles) : angles_(std::move(angles)) {}
  Configuration(std::initializer_list<double> angles) : angles_(angles) {}
  explicit Configuration(std::size_t n, double value = 0.0) : angles_(n, value) {}

  std::size_t size() const noexcept { return angles_.size(); }
  double& operator[](std::size_t i) { return angles_[i]; }
  double operator[](std::size_t i) const { return angles_[i]; }
  const std::vector<double>& angles() const noexcept { return angles_; }
  std::span<const double> view() const noexcept { return angles_; }
  auto begin() const noexcept { return angles_.begin(); }
  auto end() const noexcept { return angles_.end(); }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<double> angles_;
};

struct DhRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

/// Revolute joint with half-open limits [limit_lo, limit_hi).
struct JointModel {
  DhRow dh;
  double limit_lo = -kTwoPi;
  double limit_hi = kTwoPi;

  double span() const noexcept { return limit_hi - limit_lo; }
  bool contains(double angle) const noexcept { return angle >= limit_lo && angle < limit_hi; }

  void validate() const {
    if (!(limit_lo < limit_hi)) throw ArgumentError("joint limit_lo must be below limit_hi");
    // Two full revolutions at most; a hair of slack for decimal round trips.
    if (span() > 2.0 * kTwoPi + 1e-12) throw ArgumentError("joint span exceeds 4*pi");
  }
};

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  static Pose from_isometry(const Eigen::Isometry3d& t) {
    Pose p;
    p.position = t.translation();
    p.orientation = Eigen::Quaterniond(t.rotation()).normalized();
    return p;
  }

  Eigen::Isometry3d to_isometry() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = orientation.normalized().toRotationMatrix();
    t.translation() = position;
    return t;
  }
};

class KinematicChain {
 public:
  KinematicChain() = default;
  KinematicChain(std::string name, std::vector<JointModel> joints,
                 Eigen::Isometry3d base = Eigen::Isometry3d::Identity(),
                 Eigen::Isometry3d tool = Eigen::Isometry3d::Identity())
      : name_(std::move(name)), joints_(std::move(joints)), base_(base), tool_(tool) {
    if (joints_.empty()) throw ArgumentError("kinematic chain needs at least one joint");
    for (const auto& j : joints_) {
      j.validate();
      cos_alpha_.push_back(std::cos(j.dh.alpha));
      sin_alpha_.push_back(std::sin(j.dh.alpha));
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dof() const noexcept { return joints_.size(); }
  const std::vector<JointModel>& joints() const noexcept { return joints_; }
  const JointModel& joint(std::size_t i) const { return joints_.at(i); }
  const Eigen::Isometry3d& base_frame() const noexcept { return base_; }
  const Eigen::Isometry3d& tool_frame() const noexcept { return tool_; }
  double cos_alpha(std::size_t i) const noexcept { return cos_alpha_[i]; }
  double sin_alpha(std::size_t i) const noexcept { return sin_alpha_[i]; }

  /// Copy with one joint's limits replaced.
  KinematicChain with_limits(std::size_t i, double lo, double hi, std::string new_name) const {
    auto joints = joints_;
    joints.at(i).limit_lo = lo;
    joints.at(i).limit_hi = hi;
    return KinematicChain(std::move(new_name), std::move(joints), base_, tool_);
  }

 private:
  std::string name_;
  std::vector<JointModel> joints_;
  std::vector<double> cos_alpha_, sin_alpha_;
  Eigen::Isometry3d base_ = Eigen::Isometry3d::Identity();
  Eigen::Isometry3d tool_ = Eigen::Isometry3d::Identity();
};

inline void require_dof(const KinematicChain& chain, const Configuration& q) {
  if (q.size() != chain.dof()) {
    throw ArgumentError("configuration has " + std::to_string(q.size()) + " angles, chain '" +
                        chain.name() + "' has " + std::to_string(chain.dof()) + " joints");
  }
}

inline bool within_limits(const KinematicChain& chain, const Configuration& q) {
  require_dof(chain, q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!chain.joint(i).contains(q[i])) return false;
  }
  return true;
}

inline void require_within_limits(const KinematicChain& chain, const Configuration& q) {
  if (!within_limits(chain, q)) throw DomainError("configuration outside joint limits");
}

/// Rz(theta) * Tz(d) * Tx(a) * Rx(alpha).
inline Eigen::Isometry3d dh_transform(const DhRow& row, double joint_angle, double ca, double sa) {
  const double theta = joint_angle + row.theta_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  auto& m = t.matrix();
  m(0, 0) = ct;  m(0, 1) = -st * ca; m(0, 2) = st * sa;  m(0, 3) = row.a * ct;
  m(1, 0) = st;  m(1, 1) = ct * ca;  m(1, 2) = -ct * sa; m(1, 3) = row.a * st;
  m(2, 0) = 0.0; m(2, 1) = sa;       m(2, 2) = ca;       m(2, 3) = row.d;
  return t;
}

inline Eigen::Isometry3d dh_transform(const DhRow& row, double joint_angle) {
  return dh_transform(row, joint_angle, std::cos(row.alpha), std::sin(row.alpha));
}

/// Frame i is the pose of link i in the world; the tool transform is folded
/// into the last frame so that it coincides with the forward-kinematics pose.
inline void link_frames_into(const KinematicChain& chain, const Configuration& q,
                             std::vector<Eigen::Isometry3d>& frames) {
  require_dof(chain, q);
  frames.resize(chain.dof());
  Eigen::Isometry3d t = chain.base_frame();
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    t = t * dh_transform(chain.joint(i).dh, q[i], chain.cos_alpha(i), chain.sin_alpha(i));
    frames[i] = t;
  }
  frames.back() = frames.back() * chain.tool_frame();
}

inline std::vector<Eigen::Isometry3d> link_frames(const KinematicChain& chain,
                                                  const Configuration& q) {
  std::vector<Eigen::Isometry3d> frames;
  link_frames_into(chain, q, frames);
  return frames;
}

inline Eigen::Isometry3d forward_transform(const KinematicChain& chain, const Configuration& q) {
  require_dof(chain, q);
  Eigen::Isometry3d t = chain.base_frame();
  for (std::size_t i = 0; i < chain.dof(); ++i) t = t * dh_transform(chain.joint(i).dh, q[i]);
  return t * chain.tool_frame();
}

inline Pose forward_kinematics(const KinematicChain& chain, const Configuration& q) {
  return Pose::from_isometry(forward_transform(chain, q));
}

/// Position error (m) and rotation angle between two poses (rad).
inline std::pair<double, double> pose_error(const Pose& a, const Pose& b) {
  const double dp = (a.position - b.position).norm();
  const double dr = a.orientation.normalized().angularDistance(b.orientation.normalized());
  return {dp, dr};
}

/// Whole-turn offsets k with angle + k*2pi inside the joint's limits.
inline std::vector<int> revolution_offsets(const JointModel& joint, double angle) {
  std::vector<int> ks;
  const int k_lo = static_cast<int>(std::ceil((joint.limit_lo - angle) / kTwoPi)) - 1;
  const int k_hi = static_cast<int>(std::floor((joint.limit_hi - angle) / kTwoPi)) + 1;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (joint.contains(angle + k * kTwoPi)) ks.push_back(k);
  }
  return ks;
}

/// Every configuration reachable from q by whole-turn shifts that stays in
/// limits, q included. Order: Cartesian product, last joint fastest.
inline std::vector<Configuration> equivalent_configurations(const KinematicChain& chain,
                                                            const Configuration& q) {
  require_within_limits(chain, q);
  std::vector<std::vector<int>> offsets(chain.dof());
  for (std::size_t i = 0; i < chain.dof(); ++i) offsets[i] = revolution_offsets(chain.joint(i), q[i]);

  std::vector<Configuration> out;
  std::vector<std::size_t> idx(chain.dof(), 0);
  while (true) {
    Configuration c(chain.dof());
    for (std::size_t i = 0; i < chain.dof(); ++i) c[i] = q[i] + offsets[i][idx[i]] * kTwoPi;
    out.push_back(std::move(c));
    std::size_t j = chain.dof();
    while (j > 0) {
      --j;
      if (++idx[j] < offsets[j].size()) break;
      idx[j] = 0;
      if (j == 0) return out;
    }
  }
}

/// Most whole-turn placements a joint admits over all in-limit angles.
inline std::uint64_t max_revolutions(const JointModel& joint) {
  const double turns = joint.span() / kTwoPi;
  const double n = std::ceil(turns - 1e-9);
  return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
}

/// Product of per-joint revolution capacities. Exact for spans that are whole
/// multiples of 2pi; otherwise the supremum over configurations.
inline std::uint64_t max_equivalent_count(const KinematicChain& chain) {
  std::uint64_t n = 1;
  for (const auto& j : chain.joints()) n *= max_revolutions(j);
  return n;
}

inline double config_distance(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) throw ArgumentError("configuration dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Configuration interpolate(const Configuration& a, const Configuration& b, double t) {
  Configuration c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + (b[i] - a[i]) * t;
  return c;
}

}  // namespace redugoal
