#include "tgl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tgl/error.hpp"
#include "tgl/kd_tree.hpp"

namespace tgl {

double gaussian_affinity(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                         double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("gaussian_affinity: epsilon must be positive");
  if (x.size() != y.size()) throw InvalidArgument("gaussian_affinity: dimension mismatch");
  return std::exp(-squared_distance(x.data(), y.data(), x.size()) / epsilon);
}

Eigen::Index default_neighbor_count(Eigen::Index n) noexcept {
  auto k = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (k * k < n) ++k;
  while (k > 1 && (k - 1) * (k - 1) >= n) --k;
  return k;
}

KnnPattern build_knn_pattern(const PointMatrix& points, Eigen::Index K) {
  const Eigen::Index n = points.rows();
  if (K < 1 || K >= n) throw InvalidArgument("build_affinity: need 1 <= K < n");

  NeighborSearch search(points);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  KnnPattern out;
  out.n = n;
  out.K = K;
  out.knn_radius_sq.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto nbrs = search.knn(points.row(i).data(), K, i);
    out.knn_radius_sq[static_cast<std::size_t>(i)] = nbrs.back().dist_sq;
    auto& row = adj[static_cast<std::size_t>(i)];
    row.push_back(static_cast<int>(i));
    for (const auto& nb : nbrs) {
      row.push_back(static_cast<int>(nb.index));
      adj[static_cast<std::size_t>(nb.index)].push_back(static_cast<int>(i));
    }
  }

  Eigen::VectorXi counts(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& row = adj[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    counts[i] = static_cast<int>(row.size());
  }
  out.dist_sq.resize(n, n);
  out.dist_sq.reserve(counts);
  const Eigen::Index dim = points.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const int j : adj[static_cast<std::size_t>(i)]) {
      out.dist_sq.insert(i, j) = squared_distance(points.row(i).data(), points.row(j).data(), dim);
    }
    std::vector<int>().swap(adj[static_cast<std::size_t>(i)]);
  }
  out.dist_sq.makeCompressed();
  return out;
}

SparseAffinity build_affinity(const KnnPattern& pattern, double epsilon, int dim) {
  return build_affinity(KnnPattern(pattern), epsilon, dim);
}

SparseAffinity build_affinity(KnnPattern&& pattern, double epsilon, int dim) {
  if (!(epsilon > 0.0)) throw InvalidArgument("build_affinity: epsilon must be positive");
  SparseAffinity a;
  a.n = pattern.n;
  a.K = pattern.K;
  a.epsilon = epsilon;
  a.dim = dim;
  a.knn_radius_sq = std::move(pattern.knn_radius_sq);
  a.entries = std::move(pattern.dist_sq);
  double* v = a.entries.valuePtr();
  for (Eigen::Index k = 0; k < a.entries.nonZeros(); ++k) v[k] = std::exp(-v[k] / epsilon);
  return a;
}

SparseAffinity build_affinity(const PointCloud& cloud, Eigen::Index K, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("build_affinity: epsilon must be positive");
  return build_affinity(build_knn_pattern(cloud.ambient, K), epsilon, intrinsic_dimension(cloud.manifold));
}

std::vector<double> default_bandwidth_grid() {
  std::vector<double> g(41);
  for (int k = 0; k < 41; ++k) g[static_cast<std::size_t>(k)] = std::pow(10.0, -6.0 + 6.0 * k / 40.0);
  return g;
}

BandwidthTuning tune_bandwidth(const KnnPattern& pattern, const std::vector<double>& eps_grid) {
  const std::size_t g = eps_grid.size();
  if (g < 8) throw InvalidArgument("tune_bandwidth: grid needs at least 8 values");
  for (std::size_t k = 0; k < g; ++k) {
    if (!(eps_grid[k] > 0.0) || (k > 0 && !(eps_grid[k] > eps_grid[k - 1]))) {
      throw InvalidArgument("tune_bandwidth: grid must be positive and strictly increasing");
    }
  }
  const double n = static_cast<double>(pattern.n);
  const double* d2 = pattern.dist_sq.valuePtr();
  const Eigen::Index nnz = pattern.dist_sq.nonZeros();

  BandwidthTuning t;
  t.grid = eps_grid;
  t.log_sum.resize(g);
  for (std::size_t k = 0; k < g; ++k) {
    double s = 0.0;
    for (Eigen::Index e = 0; e < nnz; ++e) s += std::exp(-d2[e] / eps_grid[k]);
    t.log_sum[k] = std::log(s / (n * n));
  }
  t.slope.assign(g, std::numeric_limits<double>::quiet_NaN());
  std::size_t best = 0;
  double best_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < g; ++k) {
    t.slope[k] = (t.log_sum[k + 1] - t.log_sum[k - 1]) / (std::log(eps_grid[k + 1]) - std::log(eps_grid[k - 1]));
    if (t.slope[k] > best_slope) {
      best_slope = t.slope[k];
      best = k;
    }
  }
  if (!(best_slope > 1e-8)) throw TuningFailure("tune_bandwidth: kernel sum does not vary with epsilon");
  t.epsilon = eps_grid[best];
  t.d_estimate = 2.0 * best_slope;
  return t;
}

BandwidthTuning tune_bandwidth(const PointCloud& cloud, Eigen::Index K, const std::vector<double>& eps_grid) {
  return tune_bandwidth(build_knn_pattern(cloud.ambient, K), eps_grid);
}

MomentConstants moment_constants(int d) {
  if (d < 1 || d > 3) throw InvalidArgument("moment_constants: d must be 1, 2 or 3");
  const double m0 = std::pow(std::numbers::pi, 0.5 * d);
  return {m0, 0.5 * m0, d};
}

double boundary_moment(double b, double epsilon, int d, ErfArgument arg) {
  if (!(epsilon > 0.0)) throw InvalidArgument("boundary_moment: epsilon must be positive");
  if (b < 0.0) throw InvalidArgument("boundary_moment: distance must be nonnegative");
  const double scale = arg == ErfArgument::SqrtEpsilon ? std::sqrt(epsilon) : epsilon;
  const double m0 = std::pow(std::numbers::pi, 0.5 * d);
  return 0.5 * m0 * (1.0 + std::erf(b / scale));
}

}  // namespace tgl
