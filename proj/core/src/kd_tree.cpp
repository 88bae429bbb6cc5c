#include "tgl/kd_tree.hpp"

#include <algorithm>
#include <numeric>

#include "tgl/error.hpp"

namespace tgl {

double squared_distance(const double* a, const double* b, Eigen::Index dim) noexcept {
  double s = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

namespace {

// Bounded max-heap on (dist_sq, index): the root is the current worst candidate.
void offer(std::vector<Neighbor>& heap, Eigen::Index k, Neighbor cand) {
  if (static_cast<Eigen::Index>(heap.size()) < k) {
    heap.push_back(cand);
    std::push_heap(heap.begin(), heap.end());
  } else if (cand < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = cand;
    std::push_heap(heap.begin(), heap.end());
  }
}

}  // namespace

KdTree::KdTree(const PointMatrix& points, Eigen::Index leaf_size)
    : points_(&points), leaf_size_(std::max<Eigen::Index>(1, leaf_size)) {
  order_.resize(static_cast<std::size_t>(points.rows()));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  if (points.rows() > 0) {
    nodes_.reserve(static_cast<std::size_t>(2 * points.rows() / leaf_size_ + 1));
    build(0, points.rows());
  }
}

int KdTree::build(Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index dim = points_->cols();
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity());
  node.hi = Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity());
  for (Eigen::Index i = begin; i < end; ++i) {
    const auto row = points_->row(order_[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < dim; ++k) {
      node.lo[k] = std::min(node.lo[k], row[k]);
      node.hi[k] = std::max(node.hi[k], row[k]);
    }
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= leaf_size_) return id;

  Eigen::Index split_dim = 0;
  (node.hi - node.lo).maxCoeff(&split_dim);
  if (node.hi[split_dim] <= node.lo[split_dim]) return id;  // all points coincide

  const Eigen::Index mid = begin + (end - begin) / 2;
  auto first = order_.begin() + begin;
  std::nth_element(first, order_.begin() + mid, order_.begin() + end,
                   [this, split_dim](Eigen::Index a, Eigen::Index b) {
                     return (*points_)(a, split_dim) < (*points_)(b, split_dim);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double KdTree::box_distance_sq(const Node& node, const double* query) const noexcept {
  double s = 0.0;
  for (Eigen::Index k = 0; k < node.lo.size(); ++k) {
    double d = 0.0;
    if (query[k] < node.lo[k]) d = node.lo[k] - query[k];
    else if (query[k] > node.hi[k]) d = query[k] - node.hi[k];
    s += d * d;
  }
  return s;
}

void KdTree::knn_recurse(int id, const double* query, Eigen::Index k, Eigen::Index exclude,
                         std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  // Strict comparison: an equidistant point with a lower index can still win.
  if (static_cast<Eigen::Index>(heap.size()) == k && box_distance_sq(node, query) > heap.front().dist_sq) return;
  if (node.left < 0) {
    const Eigen::Index dim = points_->cols();
    for (Eigen::Index i = node.begin; i < node.end; ++i) {
      const Eigen::Index idx = order_[static_cast<std::size_t>(i)];
      if (idx == exclude) continue;
      offer(heap, k, {squared_distance(query, points_->row(idx).data(), dim), idx});
    }
    return;
  }
  const Node& l = nodes_[static_cast<std::size_t>(node.left)];
  const Node& r = nodes_[static_cast<std::size_t>(node.right)];
  if (box_distance_sq(l, query) <= box_distance_sq(r, query)) {
    knn_recurse(node.left, query, k, exclude, heap);
    knn_recurse(node.right, query, k, exclude, heap);
  } else {
    knn_recurse(node.right, query, k, exclude, heap);
    knn_recurse(node.left, query, k, exclude, heap);
  }
}

std::vector<Neighbor> KdTree::knn(const double* query, Eigen::Index k, Eigen::Index exclude) const {
  std::vector<Neighbor> heap;
  if (k <= 0 || nodes_.empty()) return heap;
  heap.reserve(static_cast<std::size_t>(k));
  knn_recurse(0, query, k, exclude, heap);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

void KdTree::within_recurse(int id, const double* query, double radius_sq, std::vector<Neighbor>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  if (box_distance_sq(node, query) > radius_sq) return;
  if (node.left < 0) {
    const Eigen::Index dim = points_->cols();
    for (Eigen::Index i = node.begin; i < node.end; ++i) {
      const Eigen::Index idx = order_[static_cast<std::size_t>(i)];
      const double d2 = squared_distance(query, points_->row(idx).data(), dim);
      if (d2 <= radius_sq) out.push_back({d2, idx});
    }
    return;
  }
  within_recurse(node.left, query, radius_sq, out);
  within_recurse(node.right, query, radius_sq, out);
}

std::vector<Neighbor> KdTree::within(const double* query, double radius_sq) const {
  std::vector<Neighbor> out;
  if (!nodes_.empty()) within_recurse(0, query, radius_sq, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> brute_force_knn(const PointMatrix& points, const double* query, Eigen::Index k,
                                      Eigen::Index exclude) {
  std::vector<Neighbor> all;
  all.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (i == exclude) continue;
    all.push_back({squared_distance(query, points.row(i).data(), points.cols()), i});
  }
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(std::max<Eigen::Index>(k, 0)), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end());
  all.resize(keep);
  return all;
}

NeighborSearch::NeighborSearch(const PointMatrix& points) : points_(&points) {
  if (points.rows() > kBruteForceLimit) tree_.emplace_back(points);
}

std::vector<Neighbor> NeighborSearch::knn(const double* query, Eigen::Index k, Eigen::Index exclude) const {
  if (!tree_.empty()) return tree_.front().knn(query, k, exclude);
  return brute_force_knn(*points_, query, k, exclude);
}

std::vector<Neighbor> NeighborSearch::within(const double* query, double radius_sq) const {
  if (!tree_.empty()) return tree_.front().within(query, radius_sq);
  std::vector<Neighbor> out;
  for (Eigen::Index i = 0; i < points_->rows(); ++i) {
    const double d2 = squared_distance(query, points_->row(i).data(), points_->cols());
    if (d2 <= radius_sq) out.push_back({d2, i});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tgl
