#include "tgl/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "tgl/error.hpp"

namespace tgl {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string_view to_string(BoundaryCondition bc) noexcept {
  switch (bc) {
    case BoundaryCondition::Dirichlet: return "dirichlet";
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Closed: return "closed";
  }
  return "unknown";
}

BoundaryCondition parse_boundary_condition(std::string_view s) {
  if (s == "dirichlet") return BoundaryCondition::Dirichlet;
  if (s == "neumann") return BoundaryCondition::Neumann;
  if (s == "closed") return BoundaryCondition::Closed;
  throw InvalidArgument("unknown boundary condition: " + std::string(s));
}

ReferenceSpectrum semicircle_spectrum(BoundaryCondition bc, Eigen::Index M) {
  if (M < 1) throw InvalidArgument("semicircle_spectrum: M must be positive");
  ReferenceSpectrum r;
  r.manifold = bc == BoundaryCondition::Closed ? Manifold::Circle : Manifold::SemiCircle;
  r.bc = bc;
  for (Eigen::Index i = 0; i < M; ++i) {
    int k = 0;
    switch (bc) {
      case BoundaryCondition::Dirichlet: k = static_cast<int>(i + 1); break;
      case BoundaryCondition::Neumann: k = static_cast<int>(i); break;
      case BoundaryCondition::Closed: k = static_cast<int>((i + 1) / 2); break;
    }
    r.eigenvalues.push_back(static_cast<double>(k) * k);
    r.angular_mode.push_back(k);
  }
  return r;
}

PeriodicSturmLiouville solve_periodic_sturm_liouville(const std::function<double(double)>& w,
                                                      const std::function<double(double)>& potential,
                                                      Eigen::Index n, Eigen::Index count) {
  if (n < 3) throw InvalidArgument("periodic Sturm-Liouville solver needs at least 3 nodes");
  count = std::min(count, n);
  const double h = 2.0 * kPi / static_cast<double>(n);
  PeriodicSturmLiouville out;
  out.grid.resize(n);
  Eigen::VectorXd wi(n), wh(n);  // node weights and w at i + 1/2
  for (Eigen::Index i = 0; i < n; ++i) {
    out.grid[i] = h * static_cast<double>(i);
    wi[i] = w(out.grid[i]);
    wh[i] = w(out.grid[i] + 0.5 * h);
  }
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  const double inv_h2 = 1.0 / (h * h);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ip = (i + 1) % n;
    const Eigen::Index im = (i + n - 1) % n;
    S(i, i) += (wh[i] + wh[im]) * inv_h2 / wi[i] + potential(out.grid[i]);
    const double off = -wh[i] * inv_h2 / std::sqrt(wi[i] * wi[ip]);
    S(i, ip) += off;
    S(ip, i) += off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  out.eigenvalues = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count);
  // Undo the similarity transform and normalize h sum w u^2 = 1.
  for (Eigen::Index k = 0; k < count; ++k) {
    Eigen::VectorXd u = (out.vectors.col(k).array() / wi.array().sqrt()).matrix();
    u /= std::sqrt(h * (wi.array() * u.array().square()).sum());
    Eigen::Index first = 0;
    u.cwiseAbs().maxCoeff(&first);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(u[i]) > 1e-10) {
        first = i;
        break;
      }
    }
    if (u[first] < 0.0) u = -u;
    out.vectors.col(k) = u;
  }
  return out;
}

ReferenceSpectrum semitorus_spectrum(Eigen::Index M, Eigen::Index n_theta) {
  if (M < 1) throw InvalidArgument("semitorus_spectrum: M must be positive");
  if (n_theta < 32) throw InvalidArgument("semitorus_spectrum: n_theta must be at least 32");
  const auto w = [](double t) { return 2.0 + std::cos(t); };

  struct Candidate {
    double lambda;
    int m;
    Eigen::VectorXd profile;
  };
  std::map<int, PeriodicSturmLiouville> solved;
  std::vector<Candidate> best;
  Eigen::VectorXd grid;

  // Each m contributes at most M eigenvalues. Widen the m range until it
  // covers ceil(3 sqrt(lambda_M)) + 5 for the current M-th eigenvalue.
  int m_max = 5;
  for (;;) {
    for (int m = 1; m <= m_max; ++m) {
      if (solved.count(m)) continue;
      const double mm = static_cast<double>(m) * m;
      solved.emplace(m, solve_periodic_sturm_liouville(w, [&](double t) { return mm / (w(t) * w(t)); }, n_theta, M));
    }
    std::vector<Candidate> all;
    for (const auto& [m, sl] : solved) {
      grid = sl.grid;
      for (Eigen::Index k = 0; k < sl.eigenvalues.size(); ++k) all.push_back({sl.eigenvalues[k], m, sl.vectors.col(k)});
    }
    std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
      return a.lambda < b.lambda || (a.lambda == b.lambda && a.m < b.m);
    });
    all.resize(static_cast<std::size_t>(std::min<Eigen::Index>(M, static_cast<Eigen::Index>(all.size()))));
    best = std::move(all);
    const int needed = static_cast<int>(std::ceil(3.0 * std::sqrt(std::max(best.back().lambda, 0.0)))) + 5;
    if (static_cast<Eigen::Index>(best.size()) == M && needed <= m_max) break;
    m_max = std::max(needed, m_max + 1);
  }

  ReferenceSpectrum r;
  r.manifold = Manifold::SemiTorus;
  r.bc = BoundaryCondition::Dirichlet;
  r.theta_grid = grid;
  r.profiles.resize(grid.size(), M);
  // Theta is normalized so that the full eigenfunction Theta(t) sin(m p) has
  // unit norm against dV = (2 + cos t) dt dp: h sum w Theta^2 = 2/pi.
  const double profile_scale = std::sqrt(2.0 / kPi);
  for (Eigen::Index k = 0; k < M; ++k) {
    const auto& c = best[static_cast<std::size_t>(k)];
    r.eigenvalues.push_back(c.lambda);
    r.angular_mode.push_back(c.m);
    r.profiles.col(k) = profile_scale * c.profile;
  }
  return r;
}

double ReferenceSpectrum::evaluate(Eigen::Index mode, const double* x) const {
  if (mode < 0 || mode >= size()) throw InvalidArgument("reference evaluate: mode out of range");
  const double t = x[0];
  const int k = angular_mode[static_cast<std::size_t>(mode)];
  switch (manifold) {
    case Manifold::SemiCircle:
      if (bc == BoundaryCondition::Dirichlet) return std::sqrt(2.0 / kPi) * std::sin(k * t);
      return k == 0 ? 1.0 / std::sqrt(kPi) : std::sqrt(2.0 / kPi) * std::cos(k * t);
    case Manifold::Circle:
      if (k == 0) return 1.0 / std::sqrt(2.0 * kPi);
      // Odd positions in the sequence 0, 1, 1, 4, 4, ... are the cosines.
      return (mode % 2 == 1 ? std::cos(k * t) : std::sin(k * t)) / std::sqrt(kPi);
    case Manifold::SemiTorus: {
      const Eigen::Index n = theta_grid.size();
      const double h = 2.0 * kPi / static_cast<double>(n);
      double s = std::fmod(t, 2.0 * kPi);
      if (s < 0.0) s += 2.0 * kPi;
      const double pos = s / h;
      auto i0 = static_cast<Eigen::Index>(std::floor(pos));
      const double frac = pos - static_cast<double>(i0);
      i0 %= n;
      const Eigen::Index i1 = (i0 + 1) % n;
      const double theta_val = (1.0 - frac) * profiles(i0, mode) + frac * profiles(i1, mode);
      return theta_val * std::sin(k * x[1]);
    }
  }
  return 0.0;
}

Eigen::MatrixXd ReferenceSpectrum::evaluate(const PointMatrix& intrinsic, Eigen::Index M) const {
  if (M > size()) throw InvalidArgument("reference evaluate: not enough modes");
  Eigen::MatrixXd out(intrinsic.rows(), M);
  for (Eigen::Index i = 0; i < intrinsic.rows(); ++i) {
    for (Eigen::Index k = 0; k < M; ++k) out(i, k) = evaluate(k, intrinsic.row(i).data());
  }
  return out;
}

PointMatrix semitorus_comparison_grid(Eigen::Index s) {
  if (s < 1) throw InvalidArgument("comparison grid size must be positive");
  PointMatrix g(s * s, 2);
  for (Eigen::Index j = 0; j < s; ++j) {
    for (Eigen::Index i = 0; i < s; ++i) {
      g(j * s + i, 0) = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(s);
      g(j * s + i, 1) = kPi * static_cast<double>(j + 1) / static_cast<double>(s + 1);
    }
  }
  return g;
}

PointMatrix embed_semitorus(const PointMatrix& intrinsic) {
  PointMatrix x(intrinsic.rows(), 3);
  for (Eigen::Index i = 0; i < intrinsic.rows(); ++i) {
    const double t = intrinsic(i, 0), p = intrinsic(i, 1);
    const double rho = 2.0 + std::cos(t);
    x(i, 0) = rho * std::cos(p);
    x(i, 1) = rho * std::sin(p);
    x(i, 2) = std::sin(t);
  }
  return x;
}

}  // namespace tgl
