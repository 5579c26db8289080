#pragma once

// Nearest-neighbor indices over joint-space points. Both implementations
// order results by (squared distance, insertion index) so they agree exactly.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "redugoal/errors.hpp"

namespace redugoal {

class NearestNeighbors {
 public:
  virtual ~NearestNeighbors() = default;
  /// Point gets index size() before the call.
  virtual void add(std::span<const double> point) = 0;
  virtual std::size_t size() const = 0;
  virtual std::size_t nearest(std::span<const double> query) const = 0;
  /// Up to k indices, closest first.
  virtual std::vector<std::size_t> k_nearest(std::span<const double> query, std::size_t k) const = 0;
};

namespace detail {

inline double squared_distance(std::span<const double> a, const double* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

using Candidate = std::pair<double, std::size_t>;  // (squared distance, index)

}  // namespace detail

class LinearNearest final : public NearestNeighbors {
 public:
  explicit LinearNearest(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> point) override {
    if (point.size() != dim_) throw ArgumentError("point dimension mismatch");
    data_.insert(data_.end(), point.begin(), point.end());
  }
  std::size_t size() const override { return dim_ == 0 ? 0 : data_.size() / dim_; }

  std::size_t nearest(std::span<const double> query) const override {
    if (size() == 0) throw DomainError("nearest query on an empty index");
    detail::Candidate best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < size(); ++i) {
      const detail::Candidate c{detail::squared_distance(query, &data_[i * dim_]), i};
      if (c < best) best = c;
    }
    return best.second;
  }

  std::vector<std::size_t> k_nearest(std::span<const double> query, std::size_t k) const override {
    std::vector<detail::Candidate> all;
    all.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) all.emplace_back(detail::squared_distance(query, &data_[i * dim_]), i);
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

/// Incremental k-d tree; splits cycle through dimensions by depth, no
/// rebalancing. Random insertion order keeps it shallow in practice.
class KdTreeNearest final : public NearestNeighbors {
 public:
  explicit KdTreeNearest(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> point) override {
    if (point.size() != dim_) throw ArgumentError("point dimension mismatch");
    const std::size_t idx = nodes_.size();
    data_.insert(data_.end(), point.begin(), point.end());
    nodes_.push_back(Node{});
    if (idx == 0) return;
    std::size_t cur = 0;
    std::size_t depth = 0;
    while (true) {
      const std::size_t axis = depth % dim_;
      const bool left = point[axis] < coord(cur, axis);
      std::size_t& child = left ? nodes_[cur].left : nodes_[cur].right;
      if (child == kNone) {
        child = idx;
        return;
      }
      cur = child;
      ++depth;
    }
  }

  std::size_t size() const override { return nodes_.size(); }

  std::size_t nearest(std::span<const double> query) const override {
    if (nodes_.empty()) throw DomainError("nearest query on an empty index");
    detail::Candidate best{std::numeric_limits<double>::infinity(), 0};
    search_nearest(0, 0, query, best);
    return best.second;
  }

  std::vector<std::size_t> k_nearest(std::span<const double> query, std::size_t k) const override {
    std::priority_queue<detail::Candidate> heap;  // worst on top
    if (k > 0 && !nodes_.empty()) search_k(0, 0, query, k, heap);
    std::vector<detail::Candidate> found;
    while (!heap.empty()) {
      found.push_back(heap.top());
      heap.pop();
    }
    std::sort(found.begin(), found.end());
    std::vector<std::size_t> out;
    out.reserve(found.size());
    for (const auto& c : found) out.push_back(c.second);
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  struct Node {
    std::size_t left = kNone;
    std::size_t right = kNone;
  };

  double coord(std::size_t node, std::size_t axis) const { return data_[node * dim_ + axis]; }

  void search_nearest(std::size_t node, std::size_t depth, std::span<const double> q,
                      detail::Candidate& best) const {
    if (node == kNone) return;
    const detail::Candidate c{detail::squared_distance(q, &data_[node * dim_]), node};
    if (c < best) best = c;
    const std::size_t axis = depth % dim_;
    const double diff = q[axis] - coord(node, axis);
    const std::size_t near = diff < 0.0 ? nodes_[node].left : nodes_[node].right;
    const std::size_t far = diff < 0.0 ? nodes_[node].right : nodes_[node].left;
    search_nearest(near, depth + 1, q, best);
    // <= keeps equal-distance points with lower indices reachable.
    if (diff * diff <= best.first) search_nearest(far, depth + 1, q, best);
  }

  void search_k(std::size_t node, std::size_t depth, std::span<const double> q, std::size_t k,
                std::priority_queue<detail::Candidate>& heap) const {
    if (node == kNone) return;
    const detail::Candidate c{detail::squared_distance(q, &data_[node * dim_]), node};
    if (heap.size() < k) {
      heap.push(c);
    } else if (c < heap.top()) {
      heap.pop();
      heap.push(c);
    }
    const std::size_t axis = depth % dim_;
    const double diff = q[axis] - coord(node, axis);
    const std::size_t near = diff < 0.0 ? nodes_[node].left : nodes_[node].right;
    const std::size_t far = diff < 0.0 ? nodes_[node].right : nodes_[node].left;
    search_k(near, depth + 1, q, k, heap);
    if (heap.size() < k || diff * diff <= heap.top().first) search_k(far, depth + 1, q, k, heap);
  }

  std::size_t dim_;
  std::vector<double> data_;
  std::vector<Node> nodes_;
};

enum class NeighborStructure { linear, kdtree };

inline std::unique_ptr<NearestNeighbors> make_nearest(NeighborStructure s, std::size_t dim) {
  if (s == NeighborStructure::kdtree) return std::make_unique<KdTreeNearest>(dim);
  return std::make_unique<LinearNearest>(dim);
}

inline std::string to_string(NeighborStructure s) { return s == NeighborStructure::kdtree ? "kdtree" : "linear"; }

inline NeighborStructure parse_neighbor_structure(const std::string& s) {
  if (s == "linear") return NeighborStructure::linear;
  if (s == "kdtree") return NeighborStructure::kdtree;
  throw ArgumentError("unknown neighbor structure '" + s + "'");
}

}  // namespace redugoal
