#include "tgl/metrics.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "tgl/error.hpp"

namespace tgl {

std::vector<Eigen::Index> match_eigenpairs(const Eigen::VectorXd& est, const std::vector<double>& ref, Eigen::Index M,
                                           MatchStrategy strategy) {
  if (est.size() < M || static_cast<Eigen::Index>(ref.size()) < M) {
    throw InvalidArgument("match_eigenpairs: fewer than M modes available");
  }
  std::vector<Eigen::Index> pairing(static_cast<std::size_t>(M));
  std::iota(pairing.begin(), pairing.end(), Eigen::Index{0});
  if (strategy == MatchStrategy::Index) return pairing;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(M));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return est[a] < est[b]; });
  std::vector<bool> used(static_cast<std::size_t>(M), false);
  for (Eigen::Index i : order) {
    Eigen::Index best = -1;
    double best_d = 0.0;
    for (Eigen::Index r = 0; r < M; ++r) {
      if (used[static_cast<std::size_t>(r)]) continue;
      const double d = std::abs(est[i] - ref[static_cast<std::size_t>(r)]);
      if (best < 0 || d < best_d) {
        best = r;
        best_d = d;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    pairing[static_cast<std::size_t>(i)] = best;
  }
  return pairing;
}

std::vector<std::vector<Eigen::Index>> reference_clusters(const std::vector<double>& ref, Eigen::Index M,
                                                          double cluster_rel_tol) {
  std::vector<std::vector<Eigen::Index>> groups;
  for (Eigen::Index k = 0; k < M; ++k) {
    const double v = ref[static_cast<std::size_t>(k)];
    if (!groups.empty()) {
      const double prev = ref[static_cast<std::size_t>(groups.back().back())];
      if (std::abs(v - prev) <= cluster_rel_tol * std::max({std::abs(v), std::abs(prev), 1.0})) {
        groups.back().push_back(k);
        continue;
      }
    }
    groups.push_back({k});
  }
  return groups;
}

double align_and_mse(const Eigen::VectorXd& u, const Eigen::MatrixXd& V, const Eigen::VectorXd& weights) {
  const Eigen::Index n = u.size();
  if (V.rows() != n || weights.size() != n || V.cols() < 1) throw InvalidArgument("align_and_mse: size mismatch");
  const Eigen::ArrayXd w = weights.array();
  const double inv_n = 1.0 / static_cast<double>(n);
  if ((w * u.array().square()).sum() <= 0.0) throw InvalidArgument("align_and_mse: zero vector");

  // Orthonormalize span(V) in the weighted inner product.
  const Eigen::ArrayXd sw = w.sqrt() * std::sqrt(inv_n);
  const Eigen::MatrixXd B = V.array().colwise() * sw;
  const Eigen::VectorXd y = (u.array() * sw).matrix();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, V.cols());
  Eigen::VectorXd c = Q.transpose() * y;
  if (V.cols() == 1) {
    // Sign alignment against the given reference vector itself.
    const Eigen::VectorXd v = B.col(0);
    const double s = y.dot(v) >= 0.0 ? 1.0 : -1.0;
    return std::clamp((y - s * v).squaredNorm(), 0.0, 4.0);
  }
  const double cn = c.norm();
  Eigen::VectorXd best = cn > 0.0 ? Eigen::VectorXd(Q * (c / cn)) : Eigen::VectorXd(Q.col(0));
  return std::clamp((y - best).squaredNorm(), 0.0, 4.0);
}

ErrorReport error_report(const Eigen::VectorXd& lambda_est, const Eigen::MatrixXd& u_est,
                         const std::vector<double>& lambda_ref, const std::vector<int>& m_ref,
                         const Eigen::MatrixXd& f_ref, const Eigen::VectorXd& weights, Eigen::Index M,
                         MatchStrategy strategy, double cluster_rel_tol) {
  if (u_est.cols() < M || f_ref.cols() < M || u_est.rows() != f_ref.rows() || weights.size() != u_est.rows()) {
    throw InvalidArgument("error_report: inconsistent inputs");
  }
  const double inv_n = 1.0 / static_cast<double>(u_est.rows());
  auto normalized = [&](const Eigen::VectorXd& v) {
    const double nrm = std::sqrt((weights.array() * v.array().square()).sum() * inv_n);
    if (!(nrm > 0.0)) throw InvalidArgument("error_report: zero eigenvector");
    return Eigen::VectorXd(v / nrm);
  };
  Eigen::MatrixXd F(f_ref.rows(), M);
  for (Eigen::Index k = 0; k < M; ++k) F.col(k) = normalized(f_ref.col(k));

  ErrorReport rep;
  rep.M = M;
  rep.matched = match_eigenpairs(lambda_est, lambda_ref, M, strategy);
  const auto clusters = reference_clusters(lambda_ref, M, cluster_rel_tol);
  std::vector<Eigen::Index> cluster_of(static_cast<std::size_t>(M));
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    for (Eigen::Index k : clusters[g]) cluster_of[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(g);
  }

  double eig_sum = 0.0, vec_sum = 0.0;
  Eigen::Index eig_count = 0;
  for (Eigen::Index i = 0; i < M; ++i) {
    const Eigen::Index r = rep.matched[static_cast<std::size_t>(i)];
    ModeError e{};
    e.mode = i;
    e.ref_mode = r;
    e.m_ref = m_ref.empty() ? 0 : m_ref[static_cast<std::size_t>(r)];
    e.lambda_est = lambda_est[i];
    e.lambda_ref = lambda_ref[static_cast<std::size_t>(r)];
    e.absolute = e.lambda_ref == 0.0;
    e.rel_err = e.absolute ? std::abs(e.lambda_est) : std::abs(e.lambda_est - e.lambda_ref) / std::abs(e.lambda_ref);
    if (!e.absolute) {
      eig_sum += e.rel_err;
      ++eig_count;
    }
    const auto& group = clusters[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(r)])];
    Eigen::MatrixXd V(F.rows(), static_cast<Eigen::Index>(group.size()));
    for (std::size_t g = 0; g < group.size(); ++g) V.col(static_cast<Eigen::Index>(g)) = F.col(group[g]);
    e.vec_mse = align_and_mse(normalized(u_est.col(i)), V, weights);
    vec_sum += e.vec_mse;
    rep.per_mode.push_back(e);
  }
  rep.mean_rel_eig_err = eig_count > 0 ? eig_sum / static_cast<double>(eig_count) : 0.0;
  rep.mean_vec_mse = vec_sum / static_cast<double>(M);
  return rep;
}

RateFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_power_law: size mismatch");
  if (std::set<double>(x.begin(), x.end()).size() < 3) throw InvalidArgument("fit_power_law: need at least 3 distinct sizes");
  const std::size_t k = x.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) throw InvalidArgument("fit_power_law: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(k);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / static_cast<double>(k));
  return f;
}

namespace {

void stats(std::vector<double> v, double& mean, double& median, double& sd) {
  const double k = static_cast<double>(v.size());
  mean = std::accumulate(v.begin(), v.end(), 0.0) / k;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
}

}  // namespace

ConvergenceFit aggregate_rows(const std::vector<ConvergenceRow>& rows) {
  std::map<Eigen::Index, std::pair<std::vector<double>, std::vector<double>>> by_n;
  for (const auto& r : rows) {
    by_n[r.n].first.push_back(r.mean_rel_eig_err);
    by_n[r.n].second.push_back(r.mean_vec_mse);
  }
  ConvergenceFit f;
  for (const auto& [n, ev] : by_n) {
    double a, b, c;
    f.n_values.push_back(n);
    stats(ev.first, a, b, c);
    f.eig_mean.push_back(a);
    f.eig_median.push_back(b);
    f.eig_std.push_back(c);
    stats(ev.second, a, b, c);
    f.vec_mean.push_back(a);
    f.vec_median.push_back(b);
    f.vec_std.push_back(c);
  }
  return f;
}

ConvergenceFit fit_rate(const std::vector<ConvergenceRow>& rows) {
  for (const auto& r : rows) {
    if (!(r.mean_rel_eig_err > 0.0) || !(r.mean_vec_mse > 0.0)) {
      throw InvalidArgument("fit_rate: error values must be positive");
    }
  }
  ConvergenceFit f = aggregate_rows(rows);
  std::vector<double> x(f.n_values.begin(), f.n_values.end());
  f.eig = fit_power_law(x, f.eig_mean);
  f.vec = fit_power_law(x, f.vec_mean);
  return f;
}

}  // namespace tgl
