#pragma once

#include <vector>

#include <Eigen/Core>

#include "tgl/sampler.hpp"

namespace tgl {

struct Neighbor {
  double dist_sq;
  Eigen::Index index;

  friend bool operator<(const Neighbor& a, const Neighbor& b) noexcept {
    return a.dist_sq < b.dist_sq || (a.dist_sq == b.dist_sq && a.index < b.index);
  }
  friend bool operator==(const Neighbor& a, const Neighbor& b) noexcept = default;
};

double squared_distance(const double* a, const double* b, Eigen::Index dim) noexcept;

/// Exact k-d tree over the rows of a point matrix.
///
/// Queries order results by (squared distance, index), so equidistant points
/// are resolved toward the lower index. The tree references `points`; the
/// matrix must outlive it.
class KdTree {
 public:
  explicit KdTree(const PointMatrix& points, Eigen::Index leaf_size = 16);

  /// The k nearest rows to `query`, skipping row `exclude` (pass -1 to keep all).
  std::vector<Neighbor> knn(const double* query, Eigen::Index k, Eigen::Index exclude = -1) const;

  /// All rows with squared distance <= radius_sq, sorted.
  std::vector<Neighbor> within(const double* query, double radius_sq) const;

  Eigen::Index size() const noexcept { return points_->rows(); }

 private:
  struct Node {
    Eigen::Index begin = 0, end = 0;
    int left = -1, right = -1;
    Eigen::VectorXd lo, hi;
  };

  int build(Eigen::Index begin, Eigen::Index end);
  double box_distance_sq(const Node& node, const double* query) const noexcept;
  void knn_recurse(int node, const double* query, Eigen::Index k, Eigen::Index exclude,
                   std::vector<Neighbor>& heap) const;
  void within_recurse(int node, const double* query, double radius_sq, std::vector<Neighbor>& out) const;

  const PointMatrix* points_;
  Eigen::Index leaf_size_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
};

/// Reference implementation used for small clouds and as a test oracle.
std::vector<Neighbor> brute_force_knn(const PointMatrix& points, const double* query, Eigen::Index k,
                                      Eigen::Index exclude = -1);

/// Picks brute force for small clouds and the tree otherwise; same results either way.
class NeighborSearch {
 public:
  static constexpr Eigen::Index kBruteForceLimit = 2000;

  explicit NeighborSearch(const PointMatrix& points);

  std::vector<Neighbor> knn(const double* query, Eigen::Index k, Eigen::Index exclude = -1) const;
  std::vector<Neighbor> within(const double* query, double radius_sq) const;

 private:
  const PointMatrix* points_;
  std::vector<KdTree> tree_;  // empty when brute force is used
};

}  // namespace tgl
