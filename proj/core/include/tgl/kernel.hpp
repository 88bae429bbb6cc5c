#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "tgl/sampler.hpp"

namespace tgl {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric KNN-sparsified Gaussian kernel matrix.
///
/// Row i stores i itself, its K nearest neighbors, and every j that lists i
/// among its own K nearest neighbors. `knn_radius_sq[i]` is the squared
/// distance from i to its K-th neighbor; a query point is adjacent to i
/// exactly when it would have been one of i's neighbors.
struct SparseAffinity {
  Eigen::Index n = 0;
  SparseMatrix entries;
  double epsilon = 0.0;
  Eigen::Index K = 0;
  int dim = 1;
  std::vector<double> knn_radius_sq;
};

/// Union-symmetrized KNN pattern with squared ambient distances, so the same
/// neighborhood can be re-weighted for many bandwidths.
struct KnnPattern {
  Eigen::Index n = 0;
  Eigen::Index K = 0;
  SparseMatrix dist_sq;  // stored zeros on the diagonal are kept
  std::vector<double> knn_radius_sq;
};

struct MomentConstants {
  double m0;
  double m2;
  int d;
};

enum class ErfArgument {
  SqrtEpsilon,  // erf(b / sqrt(eps)), dimensionless
  Epsilon,      // erf(b / eps), literal compatibility variant
};

struct BandwidthTuning {
  double epsilon;
  double d_estimate;
  std::vector<double> grid;
  std::vector<double> log_sum;  // log T(eps) per grid value
  std::vector<double> slope;    // centered slope; endpoints are NaN
};

double gaussian_affinity(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                         double epsilon);

/// ceil(sqrt(n)), the default neighbor count.
Eigen::Index default_neighbor_count(Eigen::Index n) noexcept;

KnnPattern build_knn_pattern(const PointMatrix& points, Eigen::Index K);

SparseAffinity build_affinity(const KnnPattern& pattern, double epsilon, int dim);
SparseAffinity build_affinity(KnnPattern&& pattern, double epsilon, int dim);
SparseAffinity build_affinity(const PointCloud& cloud, Eigen::Index K, double epsilon);

/// 41 log-spaced values over [1e-6, 1].
std::vector<double> default_bandwidth_grid();

/// Picks the bandwidth where d log T / d log eps peaks, T(eps) being the mean
/// kernel sum over the KNN pattern. Also returns 2 * peak slope as an estimate
/// of the intrinsic dimension.
BandwidthTuning tune_bandwidth(const KnnPattern& pattern, const std::vector<double>& eps_grid);
BandwidthTuning tune_bandwidth(const PointCloud& cloud, Eigen::Index K, const std::vector<double>& eps_grid);

MomentConstants moment_constants(int d);

/// Zeroth kernel moment of a half-space at depth b: (pi^{d/2}/2)(1 + erf(b/sqrt(eps))).
double boundary_moment(double b, double epsilon, int d, ErfArgument arg = ErfArgument::SqrtEpsilon);

}  // namespace tgl
