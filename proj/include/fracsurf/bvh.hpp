#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "fracsurf/core.hpp"

namespace fracsurf {

/// Axis-aligned bounding-box hierarchy over a fixed triangle set.
/// Built once; queries are const and thread-safe.
class TriangleBvh {
 public:
  TriangleBvh() = default;

  /// `pad` inflates every box so that near-edge hits are never culled.
  TriangleBvh(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& triangles,
              double pad) {
    if (triangles.empty()) return;
    std::vector<Box> boxes(triangles.size());
    std::vector<Vec3> centroids(triangles.size());
    for (std::size_t i = 0; i < triangles.size(); ++i) {
      Box b;
      for (int k = 0; k < 3; ++k) b.grow(vertices[triangles[i][k]]);
      b.lo.array() -= pad;
      b.hi.array() += pad;
      boxes[i] = b;
      centroids[i] = (vertices[triangles[i][0]] + vertices[triangles[i][1]] + vertices[triangles[i][2]]) / 3.0;
    }
    order_.resize(triangles.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * triangles.size());
    build(boxes, centroids, 0, static_cast<int>(order_.size()));
  }

  bool empty() const { return nodes_.empty(); }

  /// Calls visit(triangle_index) for every triangle whose box the segment
  /// o + t d, t in [t0, t1], touches.
  template <class Visit>
  void ray_query(const Vec3& o, const Vec3& d, double t0, double t1, Visit&& visit) const {
    if (nodes_.empty()) return;
    Vec3 inv;
    for (int k = 0; k < 3; ++k) inv[k] = d[k] != 0.0 ? 1.0 / d[k] : kInf;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (!node.box.hit(o, d, inv, t0, t1)) continue;
      if (node.count > 0) {
        for (int i = 0; i < node.count; ++i) visit(order_[node.first + i]);
      } else {
        stack[top++] = node.first;
        stack[top++] = node.first + 1;
      }
    }
  }

  /// Calls visit(triangle_index) for every triangle whose box overlaps [lo, hi].
  template <class Visit>
  void box_query(const Vec3& lo, const Vec3& hi, Visit&& visit) const {
    if (nodes_.empty()) return;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if ((node.box.hi.array() < lo.array()).any() || (node.box.lo.array() > hi.array()).any()) continue;
      if (node.count > 0) {
        for (int i = 0; i < node.count; ++i) visit(order_[node.first + i]);
      } else {
        stack[top++] = node.first;
        stack[top++] = node.first + 1;
      }
    }
  }

 private:
  struct Box {
    Vec3 lo = Vec3::Constant(kInf);
    Vec3 hi = Vec3::Constant(-kInf);
    void grow(const Vec3& p) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    void grow(const Box& b) {
      lo = lo.cwiseMin(b.lo);
      hi = hi.cwiseMax(b.hi);
    }
    bool hit(const Vec3& o, const Vec3& d, const Vec3& inv, double t0, double t1) const {
      for (int k = 0; k < 3; ++k) {
        if (d[k] == 0.0) {
          if (o[k] < lo[k] || o[k] > hi[k]) return false;
          continue;
        }
        double ta = (lo[k] - o[k]) * inv[k];
        double tb = (hi[k] - o[k]) * inv[k];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
      }
      return true;
    }
  };

  struct Node {
    Box box;
    int first = 0;  // child index (inner) or offset into order_ (leaf)
    int count = 0;  // > 0 for leaves
  };

  static constexpr int kLeafSize = 4;

  void build(const std::vector<Box>& boxes, const std::vector<Vec3>& centroids, int begin, int end) {
    nodes_.emplace_back();
    build_into(0, boxes, centroids, begin, end);
  }

  void build_into(int slot, const std::vector<Box>& boxes, const std::vector<Vec3>& centroids, int begin,
                  int end) {
    Box box, cbox;
    for (int i = begin; i < end; ++i) {
      box.grow(boxes[order_[i]]);
      cbox.grow(centroids[order_[i]]);
    }
    nodes_[slot].box = box;
    if (end - begin <= kLeafSize) {
      nodes_[slot].first = begin;
      nodes_[slot].count = end - begin;
      return;
    }
    int axis = 0;
    (cbox.hi - cbox.lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return centroids[a][axis] < centroids[b][axis]; });
    const int left = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[slot].first = left;
    nodes_[slot].count = 0;
    build_into(left, boxes, centroids, begin, mid);
    build_into(left + 1, boxes, centroids, mid, end);
  }

  std::vector<Node> nodes_;
  std::vector<int> order_;
};

}  // namespace fracsurf
