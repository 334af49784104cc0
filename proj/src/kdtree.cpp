#include "pcqa/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcqa {

namespace {

// Conservative shrink applied to subtree lower bounds so ulp-level rounding
// in the accumulated bound can never prune a true neighbor.
constexpr double kBoundSlack = 1.0 - 1e-12;

struct HeapCmp {
  // std:: heap keeps the "largest" on top; largest == worst candidate.
  bool operator()(const Neighbor& a, const Neighbor& b) const { return neighbor_less(a, b); }
};

}  // namespace

KdTree3::KdTree3(std::span<const Vec3> points) {
  const auto n = static_cast<int32_t>(points.size());
  ids_.resize(n);
  for (int32_t i = 0; i < n; ++i) ids_[i] = i;
  if (n == 0) return;
  nodes_.reserve(static_cast<std::size_t>(2 * n / kLeafSize + 8));
  source_ = points.data();
  root_ = build(0, n);
  source_ = nullptr;
  // Leaf-order copy for cache-friendly leaf scans.
  points_.resize(n);
  for (int32_t i = 0; i < n; ++i) points_[i] = points[ids_[i]];
}

int32_t KdTree3::build(int32_t begin, int32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin <= kLeafSize) {
    const auto id = static_cast<int32_t>(nodes_.size());
    nodes_.push_back(node);
    return id;
  }

  // Split the widest axis at the median; the point index participates in the
  // comparison so the partition is deterministic on duplicated coordinates.
  Vec3 lo = source_[ids_[begin]], hi = lo;
  for (int32_t i = begin + 1; i < end; ++i) {
    const Vec3& p = source_[ids_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  int axis = 0;
  double width = hi[0] - lo[0];
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > width) {
      width = hi[a] - lo[a];
      axis = a;
    }
  }
  const int32_t mid = begin + (end - begin) / 2;
  const Vec3* pts = source_;
  std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                   [pts, axis](int32_t ia, int32_t ib) {
                     const double va = pts[ia][axis], vb = pts[ib][axis];
                     return va < vb || (va == vb && ia < ib);
                   });

  node.axis = static_cast<int8_t>(axis);
  node.split = source_[ids_[mid]][axis];
  const auto id = static_cast<int32_t>(nodes_.size());
  nodes_.push_back(node);
  const int32_t left = build(begin, mid);
  const int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

struct KnnQuery {
  const Vec3 q;
  int k;
  std::vector<Neighbor>* heap;
  double worst = std::numeric_limits<double>::infinity();
  double axis_off2[3] = {0.0, 0.0, 0.0};

  bool full() const { return static_cast<int>(heap->size()) == k; }

  void offer(double d2, int32_t index) {
    auto& h = *heap;
    if (static_cast<int>(h.size()) < k) {
      h.push_back({d2, index});
      std::push_heap(h.begin(), h.end(), HeapCmp{});
      if (static_cast<int>(h.size()) == k) worst = h.front().dist2;
      return;
    }
    const Neighbor cand{d2, index};
    if (neighbor_less(cand, h.front())) {
      std::pop_heap(h.begin(), h.end(), HeapCmp{});
      h.back() = cand;
      std::push_heap(h.begin(), h.end(), HeapCmp{});
      worst = h.front().dist2;
    }
  }
};

void KdTree3::search(int32_t node_id, double bound, KnnQuery& ctx) const {
  const Node& node = nodes_[node_id];
  if (node.left < 0) {
    for (int32_t i = node.begin; i < node.end; ++i) {
      const Vec3 d = points_[i] - ctx.q;
      ctx.offer(dot(d, d), ids_[i]);
    }
    return;
  }
  const double diff = ctx.q[node.axis] - node.split;
  const int32_t near = diff < 0.0 ? node.left : node.right;
  const int32_t far = diff < 0.0 ? node.right : node.left;
  search(near, bound, ctx);

  // The far child's region is at least |diff| away on this axis; that offset
  // replaces whatever this axis contributed to the bound so far.
  const double cut = diff * diff;
  const double far_bound = bound - ctx.axis_off2[node.axis] + cut;
  if (!ctx.full() || far_bound * kBoundSlack <= ctx.worst) {
    const double saved = ctx.axis_off2[node.axis];
    ctx.axis_off2[node.axis] = cut;
    search(far, far_bound, ctx);
    ctx.axis_off2[node.axis] = saved;
  }
}

int KdTree3::knn(const Vec3& query, int k, std::vector<Neighbor>& out) const {
  out.clear();
  if (root_ < 0 || k <= 0) return 0;
  k = std::min<int>(k, static_cast<int>(points_.size()));
  out.reserve(k);
  KnnQuery ctx{query, k, &out};
  search(root_, 0.0, ctx);
  std::sort(out.begin(), out.end(), neighbor_less);
  return static_cast<int>(out.size());
}

int brute_force_knn(std::span<const Vec3> points, const Vec3& query, int k,
                    std::vector<Neighbor>& out) {
  out.clear();
  if (points.empty() || k <= 0) return 0;
  std::vector<Neighbor> all(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 d = points[i] - query;
    all[i] = {dot(d, d), static_cast<int32_t>(i)};
  }
  const auto kk = std::min<std::size_t>(k, all.size());
  std::partial_sort(all.begin(), all.begin() + kk, all.end(), neighbor_less);
  out.assign(all.begin(), all.begin() + kk);
  return static_cast<int>(kk);
}

}  // namespace pcqa
