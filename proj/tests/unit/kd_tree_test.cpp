#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tgl/kd_tree.hpp"
#include "tgl/rng.hpp"

namespace tgl {
namespace {

PointMatrix lattice_with_duplicates() {
  // integer lattice points produce many exact distance ties
  PointMatrix p(600, 3);
  CounterRng rng(3);
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) p(i, c) = std::floor(rng.uniform(0, 6));
  return p;
}

std::vector<Eigen::Index> indices(const std::vector<Neighbor>& v) {
  std::vector<Eigen::Index> out;
  for (const auto& nb : v) out.push_back(nb.index);
  return out;
}

TEST(KdTree, KnnMatchesSortOracleWithTies) {
  const PointMatrix p = lattice_with_duplicates();
  const KdTree tree(p, 4);
  for (Eigen::Index q = 0; q < p.rows(); q += 7) {
    for (Eigen::Index k : {1, 5, 30}) {
      EXPECT_EQ(indices(tree.knn(p.row(q).data(), k, q)), oracle::knn_by_sort(p, p.row(q).data(), k, q));
      EXPECT_EQ(indices(brute_force_knn(p, p.row(q).data(), k, q)), oracle::knn_by_sort(p, p.row(q).data(), k, q));
    }
  }
}

TEST(KdTree, WithinReturnsExactlyTheBall) {
  PointMatrix p(800, 2);
  CounterRng rng(8);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) << rng.uniform(-1, 1), rng.uniform(-1, 1);
  const KdTree tree(p);
  const double q[2] = {0.1, -0.2};
  const auto got = tree.within(q, 0.09);
  std::vector<Eigen::Index> want;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    if (squared_distance(p.row(i).data(), q, 2) <= 0.09) want.push_back(i);
  auto idx = indices(got);
  std::sort(idx.begin(), idx.end());
  EXPECT_EQ(idx, want);
  EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
}

TEST(KdTree, SearchBackendsAgree) {
  PointMatrix p(2500, 3);
  CounterRng rng(4);
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) << rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1);
  const NeighborSearch search(p);
  for (Eigen::Index q = 0; q < p.rows(); q += 97) {
    EXPECT_EQ(search.knn(p.row(q).data(), 12, q), brute_force_knn(p, p.row(q).data(), 12, q));
  }
}

}  // namespace
}  // namespace tgl
