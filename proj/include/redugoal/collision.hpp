#pragma once

// Clearance queries between spheres, capsules and oriented boxes, and
// discretized configuration/edge validity checks for a capsule robot.

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "redugoal/kinematics.hpp"

namespace redugoal {

struct Sphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

struct Capsule {
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d p1 = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

struct Box {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

using Shape = std::variant<Sphere, Capsule, Box>;

inline void validate_shape(const Shape& s) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          if ((v.half_extents.array() <= 0.0).any()) throw ArgumentError("box half-extents must be > 0");
        } else {
          if (!(v.radius > 0.0)) throw ArgumentError("shape radius must be > 0");
        }
      },
      s);
}

namespace geom {

/// Squared distance between segments p1-q1 and p2-q2 (Ericson, RTCD 5.1.9).
inline double segment_segment_sq(const Eigen::Vector3d& p1, const Eigen::Vector3d& q1,
                                 const Eigen::Vector3d& p2, const Eigen::Vector3d& q2) {
  constexpr double eps = 1e-15;
  const Eigen::Vector3d d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= eps && e <= eps) return r.squaredNorm();
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > eps * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).squaredNorm();
}

inline double point_segment_sq(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).squaredNorm();
}

/// Point expressed in the box frame; zero inside.
inline double local_point_box(const Eigen::Vector3d& p, const Eigen::Vector3d& half) {
  const Eigen::Vector3d excess = (p.cwiseAbs() - half).cwiseMax(0.0);
  return excess.norm();
}

inline Eigen::Vector3d to_box_frame(const Box& box, const Eigen::Vector3d& p) {
  return box.orientation.conjugate() * (p - box.center);
}

/// Segment given in the box frame. Distance to a convex set is convex along
/// the segment, so golden-section search converges to the minimum.
inline double local_segment_box(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                const Eigen::Vector3d& half) {
  auto f = [&](double t) { return local_point_box(a + t * (b - a), half); };
  constexpr double inv_phi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 70 && (f1 > 0.0 || f2 > 0.0); ++it) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - inv_phi * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + inv_phi * (hi - lo); f2 = f(x2);
    }
  }
  return std::min({f1, f2, f(0.0), f(1.0)});
}

/// Whether segment ab comes within r of the origin-centred box. Clips the
/// segment to the box inflated by r first; the exact convex search only runs
/// on what is left.
inline bool local_segment_box_within(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                     const Eigen::Vector3d& half, double r) {
  const Eigen::Vector3d d = b - a;
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double lo = -half[i] - r, hi = half[i] + r;
    if (std::abs(d[i]) < 1e-300) {
      if (a[i] < lo || a[i] > hi) return false;
      continue;
    }
    double ta = (lo - a[i]) / d[i], tb = (hi - a[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  auto f = [&](double t) { return local_point_box(a + t * d, half); };
  if (f(t0) <= r || f(t1) <= r || f(0.5 * (t0 + t1)) <= r) return true;
  constexpr double inv_phi = 0.6180339887498949;
  double lo = t0, hi = t1;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 70; ++it) {
    if (f1 <= r || f2 <= r) return true;
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - inv_phi * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + inv_phi * (hi - lo); f2 = f(x2);
    }
  }
  return std::min(f1, f2) <= r;
}

inline double segment_box(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Box& box) {
  return local_segment_box(to_box_frame(box, a), to_box_frame(box, b), box.half_extents);
}

inline std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> box_edges(const Box& box) {
  std::vector<Eigen::Vector3d> corners;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    corners.push_back(box.center + box.orientation * s.cwiseProduct(box.half_extents));
  }
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> edges;
  for (int i = 0; i < 8; ++i) {
    for (int bit : {1, 2, 4}) {
      if (!(i & bit)) edges.emplace_back(corners[i], corners[i | bit]);
    }
  }
  return edges;
}

/// Two convex polytopes are closest (or touch) along an edge of one of them.
inline double box_box(const Box& a, const Box& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [p, q] : box_edges(a)) best = std::min(best, segment_box(p, q, b));
  for (const auto& [p, q] : box_edges(b)) best = std::min(best, segment_box(p, q, a));
  return best;
}

}  // namespace geom

/// Signed clearance: separation minus radii. Values <= 0 mean contact. When a
/// sphere/capsule core lies inside a box the result is -radius.
inline double shape_distance(const Shape& a, const Shape& b) {
  struct Visitor {
    double operator()(const Sphere& x, const Sphere& y) const {
      return (x.center - y.center).norm() - x.radius - y.radius;
    }
    double operator()(const Sphere& x, const Capsule& y) const {
      return std::sqrt(geom::point_segment_sq(x.center, y.p0, y.p1)) - x.radius - y.radius;
    }
    double operator()(const Capsule& x, const Sphere& y) const { return (*this)(y, x); }
    double operator()(const Capsule& x, const Capsule& y) const {
      return std::sqrt(geom::segment_segment_sq(x.p0, x.p1, y.p0, y.p1)) - x.radius - y.radius;
    }
    double operator()(const Sphere& x, const Box& y) const {
      return geom::local_point_box(geom::to_box_frame(y, x.center), y.half_extents) - x.radius;
    }
    double operator()(const Box& x, const Sphere& y) const { return (*this)(y, x); }
    double operator()(const Capsule& x, const Box& y) const {
      return geom::segment_box(x.p0, x.p1, y) - x.radius;
    }
    double operator()(const Box& x, const Capsule& y) const { return (*this)(y, x); }
    double operator()(const Box& x, const Box& y) const { return geom::box_box(x, y); }
  };
  return std::visit(Visitor{}, a, b);
}

/// Capsule rigidly attached to a link, endpoints in that link's frame.
struct LinkCapsule {
  std::size_t link = 0;
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d p1 = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

struct RobotGeometry {
  std::string name;
  std::vector<LinkCapsule> link_capsules;
  std::vector<std::pair<std::size_t, std::size_t>> self_check_pairs;

  void validate(const KinematicChain& chain) const {
    for (const auto& c : link_capsules) {
      if (c.link >= chain.dof()) throw ArgumentError("capsule references a link beyond the chain");
      if (!(c.radius > 0.0)) throw ArgumentError("capsule radius must be > 0");
    }
    auto has = [&](std::size_t link) {
      return std::any_of(link_capsules.begin(), link_capsules.end(),
                         [&](const LinkCapsule& c) { return c.link == link; });
    };
    for (const auto& [i, j] : self_check_pairs) {
      if (!has(i) || !has(j)) throw ArgumentError("self-check pair names a link without capsules");
    }
  }
};

/// One capsule per link along the DH skeleton: from the previous joint origin
/// to the link origin, expressed in the link frame. Zero-length links skipped.
inline RobotGeometry skeleton_geometry(const KinematicChain& chain, double radius) {
  RobotGeometry g;
  g.name = chain.name() + "-skeleton";
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const auto& row = chain.joint(i).dh;
    Eigen::Isometry3d inv = dh_transform(row, -row.theta_offset).inverse();
    if (i + 1 == chain.dof()) inv = chain.tool_frame().inverse() * inv;
    const Eigen::Vector3d prev = inv * Eigen::Vector3d::Zero();
    const Eigen::Vector3d here = i + 1 == chain.dof() ? chain.tool_frame().inverse() * Eigen::Vector3d::Zero()
                                                      : Eigen::Vector3d::Zero();
    if ((prev - here).norm() < 1e-12) continue;
    g.link_capsules.push_back({i, prev, here, radius});
  }
  return g;
}

struct Scene {
  std::string name;
  std::vector<Shape> obstacles;
};

inline constexpr double kDefaultEdgeStep = 0.02;

/// Precomputed, read-only collision context. Safe to share across threads
/// as long as each thread uses its own `Workspace`.
class CollisionChecker {
 public:
  CollisionChecker(const Scene& scene, const RobotGeometry& robot, const KinematicChain& chain)
      : robot_(robot), chain_(chain) {
    robot_.validate(chain_);
    for (const auto& s : scene.obstacles) {
      validate_shape(s);
      Prepared p;
      p.shape = s;
      if (const auto* b = std::get_if<Box>(&s)) {
        p.to_local = b->orientation.conjugate().toRotationMatrix();
        p.axis_aligned = p.to_local.isIdentity(0.0);
        p.center = b->center;
        p.half = b->half_extents;
        const Eigen::Vector3d ext = p.to_local.transpose().cwiseAbs() * b->half_extents;
        p.lo = b->center - ext;
        p.hi = b->center + ext;
      } else if (const auto* sp = std::get_if<Sphere>(&s)) {
        p.lo = sp->center.array() - sp->radius;
        p.hi = sp->center.array() + sp->radius;
      } else if (const auto* c = std::get_if<Capsule>(&s)) {
        p.lo = c->p0.cwiseMin(c->p1).array() - c->radius;
        p.hi = c->p0.cwiseMax(c->p1).array() + c->radius;
      }
      obstacles_.push_back(std::move(p));
    }
  }

  const KinematicChain& chain() const noexcept { return chain_; }

  struct Workspace {
    std::vector<Eigen::Isometry3d> frames;
    std::vector<Capsule> capsules;
  };

  /// No limit check; caller guarantees q is in limits.
  bool in_collision(const Configuration& q, Workspace& ws) const {
    link_frames_into(chain_, q, ws.frames);
    ws.capsules.resize(robot_.link_capsules.size());
    for (std::size_t i = 0; i < robot_.link_capsules.size(); ++i) {
      const auto& lc = robot_.link_capsules[i];
      const auto& f = ws.frames[lc.link];
      ws.capsules[i] = Capsule{f * lc.p0, f * lc.p1, lc.radius};
    }
    for (const auto& cap : ws.capsules) {
      double lo[3], hi[3];
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(cap.p0[i], cap.p1[i]) - cap.radius;
        hi[i] = std::max(cap.p0[i], cap.p1[i]) + cap.radius;
      }
      for (const auto& ob : obstacles_) {
        if (lo[0] > ob.hi[0] || hi[0] < ob.lo[0] || lo[1] > ob.hi[1] || hi[1] < ob.lo[1] || lo[2] > ob.hi[2] ||
            hi[2] < ob.lo[2]) {
          continue;
        }
        if (capsule_hits(cap, ob)) return true;
      }
    }
    for (const auto& [la, lb] : robot_.self_check_pairs) {
      for (std::size_t i = 0; i < robot_.link_capsules.size(); ++i) {
        if (robot_.link_capsules[i].link != la) continue;
        for (std::size_t j = 0; j < robot_.link_capsules.size(); ++j) {
          if (robot_.link_capsules[j].link != lb) continue;
          if (shape_distance(ws.capsules[i], ws.capsules[j]) <= 0.0) return true;
        }
      }
    }
    return false;
  }

  bool in_collision(const Configuration& q) const {
    Workspace ws;
    return in_collision(q, ws);
  }

  /// Smallest signed clearance between any link capsule and any obstacle
  /// (infinity for an empty scene).
  double clearance(const Configuration& q) const {
    std::vector<Eigen::Isometry3d> frames;
    link_frames_into(chain_, q, frames);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& lc : robot_.link_capsules) {
      const auto& f = frames[lc.link];
      const Capsule cap{f * lc.p0, f * lc.p1, lc.radius};
      for (const auto& ob : obstacles_) best = std::min(best, shape_distance(cap, ob.shape));
    }
    return best;
  }

  /// Samples at fractions i/n, n = ceil(|q2-q1| / step), endpoints included.
  /// Checked coarse-to-fine so collisions tend to surface early.
  bool edge_in_collision(const Configuration& q1, const Configuration& q2, double step, Workspace& ws,
                         bool skip_start = false, bool skip_end = false) const {
    if (!(step > 0.0)) throw ArgumentError("edge check step must be > 0");
    const double dist = config_distance(q1, q2);
    const auto n = static_cast<std::size_t>(std::ceil(dist / step));
    if (!skip_start && in_collision(q1, ws)) return true;
    if (n == 0) return false;
    if (!skip_end && in_collision(q2, ws)) return true;
    // Odd multiples of each power-of-two stride, largest stride first.
    std::size_t stride = 1;
    while (stride * 2 < n) stride *= 2;
    Configuration q(q1.size());
    for (; stride > 0; stride /= 2) {
      for (std::size_t i = stride; i < n; i += 2 * stride) {
        const double t = static_cast<double>(i) / static_cast<double>(n);
        for (std::size_t j = 0; j < q.size(); ++j) q[j] = q1[j] + (q2[j] - q1[j]) * t;
        if (in_collision(q, ws)) return true;
      }
    }
    return false;
  }

 private:
  struct Prepared {
    Shape shape;
    Eigen::Matrix3d to_local = Eigen::Matrix3d::Identity();
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Vector3d half = Eigen::Vector3d::Zero();
    bool axis_aligned = false;
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  };

  static bool capsule_hits(const Capsule& cap, const Prepared& ob) {
    if (std::holds_alternative<Box>(ob.shape)) {
      Eigen::Vector3d a = cap.p0 - ob.center;
      Eigen::Vector3d b = cap.p1 - ob.center;
      if (!ob.axis_aligned) {
        a = ob.to_local * a;
        b = ob.to_local * b;
      }
      const Eigen::Vector3d reach = ob.half.array() + cap.radius;
      // Separated along a box axis: the capsule's bounding box misses the inflated box.
      if ((a.cwiseMin(b).array() > reach.array()).any() || (a.cwiseMax(b).array() < -reach.array()).any()) {
        return false;
      }
      return geom::local_segment_box_within(a, b, ob.half, cap.radius);
    }
    return shape_distance(cap, ob.shape) <= 0.0;
  }

  RobotGeometry robot_;
  KinematicChain chain_;
  std::vector<Prepared> obstacles_;
};

inline bool config_in_collision(const Scene& scene, const RobotGeometry& robot, const KinematicChain& chain,
                                const Configuration& q) {
  require_within_limits(chain, q);
  return CollisionChecker(scene, robot, chain).in_collision(q);
}

inline bool edge_in_collision(const Scene& scene, const RobotGeometry& robot, const KinematicChain& chain,
                              const Configuration& q1, const Configuration& q2, double step = kDefaultEdgeStep) {
  require_within_limits(chain, q1);
  require_within_limits(chain, q2);
  CollisionChecker checker(scene, robot, chain);
  CollisionChecker::Workspace ws;
  return checker.edge_in_collision(q1, q2, step, ws);
}

}  // namespace redugoal
