#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "tgl/eigensolver.hpp"
#include "tgl/error.hpp"
#include "tgl/kernel.hpp"
#include "tgl/laplacian.hpp"

namespace tgl {
namespace {

using std::numbers::pi;

SparseAffinity identical_pair() {
  PointMatrix p = PointMatrix::Zero(2, 1);
  return build_affinity(build_knn_pattern(p, 1), 1.0, 1);
}

struct Case {
  PointCloud cloud;
  SparseAffinity A;
  DensityEstimate q;
  LaplacianOperator L;
};

Case density_case(Eigen::Index n, Density density, double eps, std::uint64_t seed) {
  Case c;
  c.cloud = sample_semicircle(n, Scheme::Random, density, seed);
  c.A = build_affinity(c.cloud, default_neighbor_count(n) * 3, eps);
  c.q = estimate_density(c.A, c.cloud.boundary_distance, Normalization::BoundaryCorrected, ErfArgument::SqrtEpsilon);
  c.L = assemble_density_corrected(c.A, c.q, moment_constants(1), ScaleConvention::Consistent);
  return c;
}

TEST(Laplacian, DegreeSums) {
  const auto s = degree_sums(identical_pair());
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);

  PointMatrix p(3, 1);
  p << 0, 1, 2;
  const auto A = build_affinity(build_knn_pattern(p, 2), 1.0, 1);
  const auto s3 = degree_sums(A);
  EXPECT_NEAR(s3[0], (1 + std::exp(-1.0) + std::exp(-4.0)) / 3, 1e-16);
  EXPECT_GE(s3.minCoeff(), 1.0 / 3);
}

TEST(Laplacian, IdenticalPairLiteralScale) {
  const auto m = moment_constants(1);
  const auto L = assemble_symmetric_uniform(identical_pair(), m, ScaleConvention::Literal);
  const Eigen::MatrixXd dense(L.matrix());
  const double c = 2.0 / m.m2;
  EXPECT_NEAR(dense(0, 0), c * 0.5, 1e-14);
  EXPECT_NEAR(dense(0, 1), -c * 0.5, 1e-14);
  const auto spec = dense_eig(L);
  EXPECT_NEAR(spec.eigenvalues[0], 0.0, 1e-13);
  EXPECT_NEAR(spec.eigenvalues[1], c, 1e-13);
}

TEST(Laplacian, ScaleConventions) {
  const auto m = moment_constants(2);
  EXPECT_DOUBLE_EQ(laplacian_scale(m, 0.5, ScaleConvention::Literal), 2.0 / (m.m2 * 0.5));
  EXPECT_DOUBLE_EQ(laplacian_scale(m, 0.5, ScaleConvention::Consistent), 8.0);
}

TEST(Laplacian, SymmetricUniformIsExactlySymmetric) {
  const auto c = sample_semicircle(400, Scheme::Random, Density::Uniform, 4);
  const auto L = assemble_symmetric_uniform(build_affinity(c, 20, 0.01), moment_constants(1),
                                            ScaleConvention::Consistent);
  const SparseMatrix M = L.matrix();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (SparseMatrix::InnerIterator it(M, i); it; ++it) ASSERT_EQ(it.value(), M.coeff(it.col(), i));
}

TEST(Laplacian, DensityEstimateInterior) {
  const auto c = sample_semicircle(10000, Scheme::Random, Density::Uniform, 21);
  const double eps = 1e-3;
  const auto A = build_affinity(c, 300, eps);
  const auto q = estimate_density(A, c.boundary_distance, Normalization::BoundaryCorrected, ErfArgument::SqrtEpsilon);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c.boundary_distance[static_cast<std::size_t>(i)] > 3 * std::sqrt(eps)) {
      ASSERT_LT(std::abs(q.values[i] - 1 / pi), 0.1) << i;
    }
  }
}

TEST(Laplacian, DensityNormalizationsDifferByTwoAtTheBoundary) {
  const auto A = identical_pair();
  const std::vector<double> b{0.0, 0.0};
  const auto bc = estimate_density(A, b, Normalization::BoundaryCorrected, ErfArgument::SqrtEpsilon);
  const auto c0 = estimate_density(A, b, Normalization::ConstantM0, ErfArgument::SqrtEpsilon);
  EXPECT_DOUBLE_EQ(bc.values[0], 2.0 * c0.values[0]);
  EXPECT_NEAR(c0.values[0], 1.0 / std::sqrt(pi), 1e-15);
  EXPECT_THROW(estimate_density(A, {0.0}, Normalization::ConstantM0, ErfArgument::SqrtEpsilon), InvalidArgument);
}

TEST(Laplacian, DensityCorrectedIsWeightedSelfAdjoint) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto c = density_case(500, Density::BoundaryWeighted, 0.01, seed);
    EXPECT_LE(weighted_asymmetry(c.L), 1e-12);
  }
}

TEST(Laplacian, RandomWalkAnnihilatesConstants) {
  const auto c = density_case(300, Density::BoundaryWeighted, 0.01, 6);
  const Eigen::VectorXd r = apply_random_walk(c.A, c.q, moment_constants(1), Eigen::VectorXd::Ones(300),
                                              ScaleConvention::Consistent);
  EXPECT_EQ(r.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Laplacian, ConstantDensityReducesToUniform) {
  const auto cloud = sample_semicircle(2000, Scheme::Random, Density::Uniform, 8);
  const auto A = build_affinity(cloud, 60, 0.005);
  DensityEstimate q;
  q.values = Eigen::VectorXd::Constant(2000, 0.3);
  q.epsilon = 0.005;
  const auto m = moment_constants(1);
  const auto dc = assemble_density_corrected(A, q, m, ScaleConvention::Consistent);
  const auto su = assemble_symmetric_uniform(A, m, ScaleConvention::Consistent);
  EXPECT_LE((Eigen::MatrixXd(dc.companion) - Eigen::MatrixXd(su.companion)).cwiseAbs().maxCoeff(), 1e-15);
  const auto s1 = smallest_eigenpairs(truncate_dirichlet(dc, cloud.boundary_distance, 0.07), 5);
  const auto s2 = smallest_eigenpairs(truncate_dirichlet(su, cloud.boundary_distance, 0.07), 5);
  for (int k = 0; k < 5; ++k)
    EXPECT_NEAR(s1.eigenvalues[k], s2.eigenvalues[k], 10 / std::sqrt(2000.0) * s2.eigenvalues[k]);
}

TEST(Laplacian, TruncationCountsMatchBruteForce) {
  const auto c = sample_semicircle(100, Scheme::Grid, Density::Uniform, 0);
  const auto A = build_affinity(c, 10, 0.04);
  const auto L = assemble_symmetric_uniform(A, moment_constants(1), ScaleConvention::Consistent);
  const auto T = truncate_dirichlet(L, c.boundary_distance, 0.2);
  Eigen::Index kept = 0;
  for (int i = 1; i <= 100; ++i) {
    const double t = pi * i / 101;
    kept += std::min(t, pi - t) > 0.2;
  }
  EXPECT_EQ(kept, 88);
  EXPECT_EQ(T.size(), kept);
  EXPECT_EQ(T.parent_size, 100);
  EXPECT_FALSE(T.untouched_by_truncation);
}

TEST(Laplacian, TruncationIsParentSubBlock) {
  const auto c = density_case(500, Density::BoundaryWeighted, 0.01, 12);
  const auto T = truncate_dirichlet(c.L, c.cloud.boundary_distance, 0.1);
  const Eigen::MatrixXd parent(c.L.companion), sub(T.companion);
  Eigen::Index n0 = 0;
  for (double b : c.cloud.boundary_distance) n0 += b <= 0.1;
  EXPECT_EQ(T.size() + n0, 500);
  for (Eigen::Index a = 0; a < T.size(); ++a) {
    for (Eigen::Index b = 0; b < T.size(); ++b) {
      ASSERT_EQ(sub(a, b), parent(T.kept_indices[static_cast<std::size_t>(a)],
                                  T.kept_indices[static_cast<std::size_t>(b)]));
    }
    EXPECT_EQ(T.measure_weights[a], c.L.measure_weights[T.kept_indices[static_cast<std::size_t>(a)]]);
  }
  EXPECT_LE(weighted_asymmetry(T), 1e-12);
}

TEST(Laplacian, TruncationEdgeCases) {
  const auto c = sample_semicircle(50, Scheme::Grid, Density::Uniform, 0);
  const auto L = assemble_symmetric_uniform(build_affinity(c, 5, 0.01), moment_constants(1),
                                            ScaleConvention::Consistent);
  EXPECT_THROW(truncate_dirichlet(L, c.boundary_distance, 2.0), EmptyTruncation);
  EXPECT_THROW(truncate_dirichlet(L, c.boundary_distance, 0.0), InvalidArgument);
  const auto all = truncate_dirichlet(L, c.boundary_distance, 1e-9);
  EXPECT_TRUE(all.untouched_by_truncation);
  EXPECT_EQ(all.size(), 50);
  EXPECT_THROW(truncate_dirichlet(all, c.boundary_distance, 0.1), InvalidArgument);
}

TEST(Laplacian, BandwidthScaleCovariance) {
  const auto c = sample_semicircle(200, Scheme::Random, Density::Uniform, 5);
  const auto pattern = build_knn_pattern(c.ambient, 15);
  const auto m = moment_constants(1);
  const auto L1 = assemble_symmetric_uniform(build_affinity(pattern, 0.01, 1), m, ScaleConvention::Consistent);
  const auto L2 = assemble_symmetric_uniform(build_affinity(pattern, 0.04, 1), m, ScaleConvention::Consistent);
  EXPECT_NEAR(L1.scale, 4.0 * L2.scale, 1e-12 * L1.scale);
  EXPECT_EQ(L1.companion.nonZeros(), L2.companion.nonZeros());
}

}  // namespace
}  // namespace tgl
