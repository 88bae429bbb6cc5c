#include "tgl/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "tgl/error.hpp"
#include "tgl/rng.hpp"

namespace tgl {

namespace {

Eigen::VectorXd random_unit(Eigen::Index n, CounterRng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v.normalized();
}

// Two passes of classical Gram-Schmidt against the first `k` columns of V.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& V, Eigen::Index k, Eigen::VectorXd& w) {
  Eigen::VectorXd h = V.leftCols(k).transpose() * w;
  w.noalias() -= V.leftCols(k) * h;
  const Eigen::VectorXd h2 = V.leftCols(k).transpose() * w;
  w.noalias() -= V.leftCols(k) * h2;
  return h + h2;
}

struct GershgorinBounds {
  double lo, hi;
};

GershgorinBounds gershgorin(const SparseMatrix& S) {
  GershgorinBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    double diag = 0.0, off = 0.0;
    for (SparseMatrix::InnerIterator it(S, i); it; ++it) {
      if (it.col() == i) diag = it.value();
      else off += std::abs(it.value());
    }
    b.lo = std::min(b.lo, diag - off);
    b.hi = std::max(b.hi, diag + off);
  }
  return b;
}

// Applies T_d((S - c) / e), which maps [c - e, c + e] into [-1, 1] and grows
// monotonically above it.
class FilteredOperator {
 public:
  FilteredOperator(const SparseMatrix& S, int degree, double c, double e)
      : S_(S), degree_(degree), c_(c), e_(e) {}

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    if (degree_ == 1 && e_ == 1.0 && c_ == 0.0) {
      y.noalias() = S_ * x;
      return;
    }
    y0_ = x;
    y.noalias() = S_ * x;
    y = (y - c_ * x) / e_;
    for (int k = 2; k <= degree_; ++k) {
      y2_.noalias() = S_ * y;
      y2_ = 2.0 * (y2_ - c_ * y) / e_ - y0_;
      y0_.swap(y);
      y.swap(y2_);
    }
  }

  long long cost() const noexcept { return degree_; }

 private:
  const SparseMatrix& S_;
  int degree_;
  double c_, e_;
  Eigen::VectorXd y0_, y2_;
};

struct LanczosCycleResult {
  Eigen::VectorXd ritz;      // descending, in the filtered spectrum
  Eigen::MatrixXd vectors;   // Ritz vectors for the top `want` values
  Eigen::VectorXd sigma;     // Rayleigh quotients in S
  Eigen::VectorXd residuals; // |S x - sigma x|
  bool converged = false;
};

class ThickRestartLanczos {
 public:
  ThickRestartLanczos(const SparseMatrix& S, Eigen::Index want, Eigen::Index m, double tol, CounterRng& rng)
      : S_(S), n_(S.rows()), want_(want), m_(m), tol_(tol), rng_(rng), V_(n_, m + 1), T_(m, m) {}

  void start(const Eigen::VectorXd& v0) {
    V_.col(0) = v0.normalized();
    kept_ = 0;
    T_.setZero();
  }

  LanczosCycleResult cycle(FilteredOperator& op, long long& matvecs) {
    Eigen::VectorXd w(n_);
    double beta_last = 0.0;
    for (Eigen::Index j = kept_; j < m_; ++j) {
      op.apply(V_.col(j), w);
      matvecs += op.cost();
      const double wnorm = w.norm();
      const Eigen::VectorXd h = orthogonalize(V_, j + 1, w);
      T_.block(0, j, j + 1, 1) = h;
      T_.block(j, 0, 1, j + 1) = h.transpose();
      double beta = w.norm();
      if (beta <= 1e-12 * std::max(wnorm, 1e-300)) {
        beta = 0.0;
        if (j + 1 < m_) {
          Eigen::VectorXd r = random_unit(n_, rng_);
          orthogonalize(V_, j + 1, r);
          V_.col(j + 1) = r.normalized();
        } else {
          V_.col(j + 1).setZero();
        }
      } else {
        V_.col(j + 1) = w / beta;
      }
      beta_last = beta;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T_);
    const Eigen::VectorXd theta = es.eigenvalues().reverse();
    const Eigen::MatrixXd Y = es.eigenvectors().rowwise().reverse();

    LanczosCycleResult res;
    res.ritz = theta;
    res.vectors = V_.leftCols(m_) * Y.leftCols(want_);
    const Eigen::MatrixXd SX = S_ * res.vectors;
    matvecs += want_;
    res.sigma.resize(want_);
    res.residuals.resize(want_);
    for (Eigen::Index i = 0; i < want_; ++i) {
      res.sigma[i] = res.vectors.col(i).dot(SX.col(i));
      res.residuals[i] = (SX.col(i) - res.sigma[i] * res.vectors.col(i)).norm();
    }
    res.converged = (res.residuals.array() <= tol_).all();

    // Thick restart: keep the leading Ritz vectors and continue from the
    // residual direction.
    const Eigen::Index k = std::min<Eigen::Index>(m_ - 1, want_ + std::max<Eigen::Index>(1, (m_ - want_) / 2));
    if (!res.converged && k > 0 && beta_last > 0.0) {
      const Eigen::MatrixXd kept = V_.leftCols(m_) * Y.leftCols(k);
      const Eigen::VectorXd next = V_.col(m_);
      V_.leftCols(k) = kept;
      V_.col(k) = next;
      T_.setZero();
      for (Eigen::Index i = 0; i < k; ++i) T_(i, i) = theta[i];
      kept_ = k;
    } else if (!res.converged) {
      // Invariant subspace without convergence: restart from the best vectors.
      start(res.vectors.rowwise().sum() + 1e-3 * random_unit(n_, rng_));
    }
    return res;
  }

 private:
  const SparseMatrix& S_;
  Eigen::Index n_, want_, m_;
  double tol_;
  CounterRng& rng_;
  Eigen::MatrixXd V_;
  Eigen::MatrixXd T_;
  Eigen::Index kept_ = 0;
};

void sort_descending(SymmetricEigenResult& r) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r.values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return r.values[a] > r.values[b]; });
  SymmetricEigenResult s = r;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    s.values[i] = r.values[order[k]];
    s.vectors.col(i) = r.vectors.col(order[k]);
    s.residuals[i] = r.residuals[order[k]];
  }
  r = std::move(s);
}

SymmetricEigenResult dense_largest(const SparseMatrix& S, Eigen::Index M) {
  const Eigen::MatrixXd D = Eigen::MatrixXd(S);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigensolver failed", {});
  SymmetricEigenResult r;
  r.values = es.eigenvalues().reverse().head(M);
  r.vectors = es.eigenvectors().rowwise().reverse().leftCols(M);
  r.residuals.resize(M);
  for (Eigen::Index i = 0; i < M; ++i) r.residuals[i] = (D * r.vectors.col(i) - r.values[i] * r.vectors.col(i)).norm();
  return r;
}

Spectrum finish(const LaplacianOperator& L, const SymmetricEigenResult& r) {
  Spectrum sp;
  const Eigen::Index na = L.size();
  const Eigen::Index M = r.values.size();
  sp.sigma = r.values;
  sp.eigenvalues = (L.scale * (1.0 - r.values.array())).matrix();
  sp.residuals = r.residuals;
  sp.norm_kind = L.kind == OperatorKind::SymmetricUniform || L.base_kind == OperatorKind::SymmetricUniform
                     ? NormKind::EmpiricalUniform
                     : NormKind::EmpiricalWeighted;
  sp.kind = L.kind;
  sp.epsilon = L.epsilon;
  sp.scale = L.scale;
  sp.measure_weights = L.measure_weights;
  sp.kept_indices = L.kept_indices;
  sp.parent_size = L.parent_size;
  sp.restarts = r.restarts;
  sp.matvecs = r.matvecs;
  sp.filter_degree = r.filter_degree;

  const Eigen::ArrayXd inv_sqrt_w = L.measure_weights.array().rsqrt();
  sp.eigenvectors.resize(na, M);
  for (Eigen::Index k = 0; k < M; ++k) {
    Eigen::VectorXd u = (r.vectors.col(k).array() * inv_sqrt_w).matrix();
    // Unit norm in (1/n_a) sum w u^2 given |y| = 1; renormalize to absorb rounding.
    const double norm = std::sqrt((L.measure_weights.array() * u.array().square()).sum() / static_cast<double>(na));
    u /= norm;
    const double cutoff = 1e-10 * u.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < na; ++i) {
      if (std::abs(u[i]) > cutoff) {
        if (u[i] < 0.0) u = -u;
        break;
      }
    }
    sp.eigenvectors.col(k) = u;
  }
  return sp;
}

}  // namespace

SparseMatrix symmetrized_companion(const LaplacianOperator& L, double tol) {
  const Eigen::Index n = L.size();
  if (L.measure_weights.size() != n) throw InvalidOperator("measure weights do not match the operator size");
  if ((L.measure_weights.array() <= 0.0).any()) throw InvalidOperator("measure weights must be positive");
  const Eigen::ArrayXd sw = L.measure_weights.array().sqrt();
  const SparseMatrix& C = L.companion;
  SparseMatrix S = C;
  double worst = 0.0, biggest = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(S, i); it; ++it) {
      const Eigen::Index j = it.col();
      const double a = it.value() * (sw[i] / sw[j]);
      const double b = C.coeff(j, i) * (sw[j] / sw[i]);
      worst = std::max(worst, std::abs(a - b));
      biggest = std::max(biggest, std::abs(a));
      it.valueRef() = 0.5 * (a + b);
    }
  }
  if (worst > tol * std::max(biggest, 1e-300)) {
    throw InvalidOperator("operator is not self-adjoint in its weighted inner product");
  }
  return S;
}

SymmetricEigenResult largest_eigenpairs(const SparseMatrix& S, Eigen::Index M, const EigenOptions& options) {
  const Eigen::Index n = S.rows();
  if (M < 1 || M > n) throw InvalidArgument("eigensolver: need 1 <= M <= n");
  if (!(options.tol > 0.0)) throw InvalidArgument("eigensolver: tolerance must be positive");
  Eigen::Index m = options.krylov_dim > 0 ? options.krylov_dim : 4 * M + 40;
  m = std::min(m, n);
  if (m <= M && m < n) throw InvalidArgument("eigensolver: Krylov dimension must exceed M");

  CounterRng rng(options.seed, 0);
  ThickRestartLanczos lanczos(S, M, m, options.tol, rng);
  SymmetricEigenResult out;
  Eigen::VectorXd best_res;

  auto accept = [&](const LanczosCycleResult& c, int restarts) {
    out.values = c.sigma;
    out.vectors = c.vectors;
    out.residuals = c.residuals;
    out.restarts = restarts;
    sort_descending(out);
  };

  // First pass on S itself. It either converges outright or supplies the Ritz
  // values used to place the polynomial filter.
  FilteredOperator plain(S, 1, 0.0, 1.0);
  lanczos.start(random_unit(n, rng));
  LanczosCycleResult c = lanczos.cycle(plain, out.matvecs);
  if (c.converged || m == n) {
    accept(c, 0);
    if (!c.converged) {
      throw ConvergenceFailure("eigensolver: full Krylov space did not converge",
                               std::vector<double>(c.residuals.data(), c.residuals.data() + c.residuals.size()));
    }
    return out;
  }

  int degree = options.filter_degree;
  double fc = 0.0, fe = 1.0;
  if (degree != 1) {
    const GershgorinBounds gb = gershgorin(S);
    // Interlacing: the j-th largest Ritz value never exceeds the j-th largest
    // eigenvalue, so every wanted eigenvalue sits above `cut`.
    const Eigen::Index cut_index = std::min<Eigen::Index>(m - 1, M + std::max<Eigen::Index>(2, M / 2));
    const double cut = c.ritz[cut_index];
    const double lo = std::min(gb.lo, c.ritz[m - 1]);
    fc = 0.5 * (cut + lo);
    fe = 0.5 * (cut - lo);
    const double x_hi = (std::max(gb.hi, c.ritz[0]) - fc) / fe;
    const int cap = std::max(1, static_cast<int>(600.0 / std::acosh(std::max(x_hi, 1.0 + 1e-12))));
    if (degree <= 0) {
      // Aim for a modest separation factor T_d(x) ~ cosh(2.5) at the wanted edge.
      const double x_w = (c.ritz[M - 1] - fc) / fe;
      const double a = std::acosh(std::max(x_w, 1.0 + 1e-14));
      degree = static_cast<int>(std::ceil(2.5 / a));
    }
    degree = std::clamp(degree, 1, std::min(cap, 400));
    if (!(fe > 0.0)) degree = 1;
  }
  if (degree == 1) {
    fc = 0.0;
    fe = 1.0;
  } else {
    lanczos.start(c.vectors.rowwise().sum() + 1e-6 * random_unit(n, rng));
  }
  out.filter_degree = degree;
  FilteredOperator filtered(S, degree, fc, fe);

  for (int restart = 1; restart <= options.max_restarts; ++restart) {
    c = lanczos.cycle(filtered, out.matvecs);
    if (c.converged) {
      accept(c, restart);
      return out;
    }
  }
  throw ConvergenceFailure("eigensolver: restart cap reached",
                           std::vector<double>(c.residuals.data(), c.residuals.data() + c.residuals.size()));
}

Spectrum smallest_eigenpairs(const LaplacianOperator& L, Eigen::Index M, const EigenOptions& options) {
  if (M < 1 || M > L.size()) throw InvalidArgument("smallest_eigenpairs: need 1 <= M <= n");
  const SparseMatrix S = symmetrized_companion(L);
  if (L.size() <= 64) return finish(L, dense_largest(S, M));
  return finish(L, largest_eigenpairs(S, M, options));
}

Spectrum dense_eig(const LaplacianOperator& L) {
  if (L.size() > kDenseLimit) throw SizeLimitExceeded("dense_eig: operator larger than the dense limit");
  const SparseMatrix S = symmetrized_companion(L);
  return finish(L, dense_largest(S, L.size()));
}

LaplacianOperator operator_from_matrix(const SparseMatrix& laplacian, const Eigen::VectorXd& weights, double scale) {
  const Eigen::Index n = laplacian.rows();
  if (laplacian.cols() != n || weights.size() != n) throw InvalidArgument("operator_from_matrix: shape mismatch");
  if (!(scale > 0.0)) throw InvalidArgument("operator_from_matrix: scale must be positive");
  LaplacianOperator L;
  L.kind = OperatorKind::DensityCorrected;
  L.base_kind = (weights.array() == 1.0).all() ? OperatorKind::SymmetricUniform : OperatorKind::DensityCorrected;
  L.kind = L.base_kind;
  L.scale = scale;
  L.measure_weights = weights;
  L.parent_size = n;
  L.kept_indices.resize(static_cast<std::size_t>(n));
  std::iota(L.kept_indices.begin(), L.kept_indices.end(), Eigen::Index{0});
  L.column_weights = weights;
  L.row_normalizers = Eigen::VectorXd::Ones(n);
  SparseMatrix I(n, n);
  I.setIdentity();
  L.companion = SparseMatrix(I - laplacian / scale);
  L.companion.makeCompressed();
  return L;
}

}  // namespace tgl
