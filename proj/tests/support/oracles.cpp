#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

#include <Eigen/Eigenvalues>

namespace tgl::oracle {

using std::numbers::pi;

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double integrate_rd(const std::function<double(const double*)>& f, int d, double L, int panels) {
  double x[3] = {0, 0, 0};
  std::function<double(int)> nest = [&](int axis) -> double {
    if (axis == d) return f(x);
    return simpson(
        [&](double t) {
          x[axis] = t;
          return nest(axis + 1);
        },
        -L, L, panels);
  };
  return nest(0);
}

std::vector<Eigen::Index> knn_by_sort(const PointMatrix& points, const double* query, Eigen::Index k,
                                      Eigen::Index exclude) {
  std::vector<std::pair<double, Eigen::Index>> all;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (i == exclude) continue;
    double d = 0.0;
    for (Eigen::Index c = 0; c < points.cols(); ++c) d += (points(i, c) - query[c]) * (points(i, c) - query[c]);
    all.emplace_back(d, i);
  }
  std::sort(all.begin(), all.end());
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < k && i < static_cast<Eigen::Index>(all.size()); ++i) out.push_back(all[i].second);
  return out;
}

namespace {

double metric_length(double t0, double p0, double t1, double p1) {
  // midpoint rule for the length of the straight intrinsic segment
  const double tm = 0.5 * (t0 + t1);
  const double w = 2.0 + std::cos(tm);
  const double dt = t1 - t0, dp = p1 - p0;
  return std::sqrt(dt * dt + w * w * dp * dp);
}

}  // namespace

SemitorusGeodesic::SemitorusGeodesic(int n_theta, int n_phi) : nt_(n_theta), np_(n_phi) {
  const double ht = 2 * pi / nt_, hp = pi / np_;
  const int total = nt_ * (np_ + 1);
  dist_.assign(static_cast<std::size_t>(total), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int i = 0; i < nt_; ++i) {
    for (int j : {0, np_}) {
      dist_[static_cast<std::size_t>(j * nt_ + i)] = 0.0;
      heap.emplace(0.0, j * nt_ + i);
    }
  }
  std::vector<std::pair<int, int>> steps;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      if ((a || b) && std::gcd(std::abs(a), std::abs(b)) == 1) steps.emplace_back(a, b);
  while (!heap.empty()) {
    auto [d, node] = heap.top();
    heap.pop();
    if (d > dist_[static_cast<std::size_t>(node)]) continue;
    const int i = node % nt_, j = node / nt_;
    for (auto [a, b] : steps) {
      const int jj = j + b;
      if (jj < 0 || jj > np_) continue;
      const int ii = ((i + a) % nt_ + nt_) % nt_;
      const double len = metric_length(i * ht, j * hp, (i + a) * ht, jj * hp);
      const int nb = jj * nt_ + ii;
      if (d + len < dist_[static_cast<std::size_t>(nb)]) {
        dist_[static_cast<std::size_t>(nb)] = d + len;
        heap.emplace(d + len, nb);
      }
    }
  }
}

double SemitorusGeodesic::distance(double theta, double phi) const {
  const int i = static_cast<int>(std::lround(theta / (2 * pi / nt_))) % nt_;
  const int j = static_cast<int>(std::lround(phi / (pi / np_)));
  return dist_[static_cast<std::size_t>(j * nt_ + i)];
}

double SemitorusGeodesic::spacing() const { return std::max(2 * pi / nt_, 3.0 * pi / np_); }

std::vector<double> fd_interval_spectrum(bool neumann, int N, int count) {
  // Neumann: cell-centred unknowns with mirrored ghosts; Dirichlet: interior nodes.
  const int n = neumann ? N : N - 1;
  const double h = pi / N;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 2.0 / (h * h));
  Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, -1.0 / (h * h));
  if (neumann) {
    diag[0] = 1.0 / (h * h);
    diag[n - 1] = 1.0 / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + count);
  return out;
}

std::vector<double> galerkin_theta_spectrum(int m, int K, int count) {
  // Basis e^{ik theta}; w = 2 + cos has coefficients 2, 1/2 and 1/w has
  // rho^{|k|}/sqrt(3) with rho = sqrt(3) - 2.
  const int n = 2 * K + 1;
  const double rho = std::sqrt(3.0) - 2.0;
  auto w_hat = [](int k) { return k == 0 ? 2.0 : (std::abs(k) == 1 ? 0.5 : 0.0); };
  auto g_hat = [&](int k) { return std::pow(rho, std::abs(k)) / std::sqrt(3.0); };
  Eigen::MatrixXd A(n, n), B(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int j = a - K, k = b - K;
      A(a, b) = static_cast<double>(j) * k * w_hat(j - k) + m * m * g_hat(j - k);
      B(a, b) = w_hat(j - k);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + count);
  return out;
}

std::vector<double> galerkin_semitorus_spectrum(int M, int K) {
  std::vector<double> all;
  for (int m = 1;; ++m) {
    auto vals = galerkin_theta_spectrum(m, K, M);
    if (!all.empty() && static_cast<int>(all.size()) >= M) {
      std::sort(all.begin(), all.end());
      if (vals.front() > all[static_cast<std::size_t>(M - 1)]) break;
    }
    all.insert(all.end(), vals.begin(), vals.end());
  }
  std::sort(all.begin(), all.end());
  all.resize(static_cast<std::size_t>(M));
  return all;
}

}  // namespace tgl::oracle
