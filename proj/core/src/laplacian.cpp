#include "tgl/laplacian.hpp"

#include <cmath>

#include "tgl/error.hpp"

namespace tgl {

namespace {

LaplacianOperator assemble(const SparseAffinity& A, const Eigen::VectorXd& cw, const Eigen::VectorXd& rn,
                           const MomentConstants& m, ScaleConvention convention, OperatorKind kind) {
  const Eigen::Index n = A.n;
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd half_inv = (2.0 * rn.array()).inverse().matrix();

  LaplacianOperator L;
  L.kind = kind;
  L.base_kind = kind;
  L.epsilon = A.epsilon;
  L.m2 = m.m2;
  L.dim = A.dim;
  L.scale = laplacian_scale(m, A.epsilon, convention);
  L.measure_weights = kind == OperatorKind::SymmetricUniform ? Eigen::VectorXd::Ones(n) : cw;
  L.kept_indices.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) L.kept_indices[static_cast<std::size_t>(i)] = i;
  L.parent_size = n;
  L.column_weights = cw;
  L.row_normalizers = rn;

  L.companion = A.entries;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(L.companion, i); it; ++it) {
      const Eigen::Index j = it.col();
      it.valueRef() = it.value() * cw[j] * (half_inv[i] + half_inv[j]) * inv_n;
    }
  }
  return L;
}

}  // namespace

SparseMatrix LaplacianOperator::matrix() const {
  SparseMatrix out = companion;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (SparseMatrix::InnerIterator it(out, i); it; ++it) {
      it.valueRef() = scale * ((it.col() == i ? 1.0 : 0.0) - it.value());
    }
  }
  return out;
}

Eigen::VectorXd degree_sums(const SparseAffinity& A) {
  Eigen::VectorXd s(A.n);
  const double inv_n = 1.0 / static_cast<double>(A.n);
  for (Eigen::Index i = 0; i < A.n; ++i) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(A.entries, i); it; ++it) acc += it.value();
    s[i] = acc * inv_n;
  }
  return s;
}

DensityEstimate estimate_density(const SparseAffinity& A, const std::vector<double>& boundary_distance,
                                 Normalization normalization, ErfArgument arg) {
  if (static_cast<Eigen::Index>(boundary_distance.size()) != A.n) {
    throw InvalidArgument("estimate_density: boundary distance length does not match the affinity");
  }
  const Eigen::VectorXd s = degree_sums(A);
  const double pre = std::pow(A.epsilon, -0.5 * A.dim);
  const double m0 = moment_constants(A.dim).m0;
  DensityEstimate q;
  q.epsilon = A.epsilon;
  q.normalization = normalization;
  q.values.resize(A.n);
  for (Eigen::Index i = 0; i < A.n; ++i) {
    const double mass = normalization == Normalization::BoundaryCorrected
                            ? boundary_moment(boundary_distance[static_cast<std::size_t>(i)], A.epsilon, A.dim, arg)
                            : m0;
    q.values[i] = pre * s[i] / mass;
  }
  return q;
}

double laplacian_scale(const MomentConstants& m, double epsilon, ScaleConvention convention) {
  const double literal = 2.0 / (m.m2 * epsilon);
  return convention == ScaleConvention::Consistent ? m.m0 * literal : literal;
}

LaplacianOperator assemble_symmetric_uniform(const SparseAffinity& A, const MomentConstants& m,
                                             ScaleConvention convention) {
  return assemble(A, Eigen::VectorXd::Ones(A.n), degree_sums(A), m, convention, OperatorKind::SymmetricUniform);
}

namespace {

Eigen::VectorXd weighted_degrees(const SparseAffinity& A, const Eigen::VectorXd& cw) {
  Eigen::VectorXd d(A.n);
  const double inv_n = 1.0 / static_cast<double>(A.n);
  for (Eigen::Index i = 0; i < A.n; ++i) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(A.entries, i); it; ++it) acc += it.value() * cw[it.col()];
    d[i] = acc * inv_n;
  }
  return d;
}

Eigen::VectorXd inverse_density(const SparseAffinity& A, const DensityEstimate& q) {
  if (q.values.size() != A.n) throw InvalidArgument("density estimate length does not match the affinity");
  if ((q.values.array() <= 0.0).any() || !q.values.allFinite()) {
    throw InvalidArgument("density estimate must be strictly positive");
  }
  return q.values.array().inverse().matrix();
}

}  // namespace

LaplacianOperator assemble_density_corrected(const SparseAffinity& A, const DensityEstimate& q,
                                             const MomentConstants& m, ScaleConvention convention) {
  const Eigen::VectorXd cw = inverse_density(A, q);
  return assemble(A, cw, weighted_degrees(A, cw), m, convention, OperatorKind::DensityCorrected);
}

Eigen::VectorXd apply_random_walk(const SparseAffinity& A, const DensityEstimate& q, const MomentConstants& m,
                                  const Eigen::VectorXd& u, ScaleConvention convention) {
  if (u.size() != A.n) throw InvalidArgument("apply_random_walk: vector length mismatch");
  const Eigen::VectorXd cw = inverse_density(A, q);
  const Eigen::VectorXd d = weighted_degrees(A, cw);
  const double scale = laplacian_scale(m, A.epsilon, convention);
  const double inv_n = 1.0 / static_cast<double>(A.n);
  Eigen::VectorXd out(A.n);
  for (Eigen::Index i = 0; i < A.n; ++i) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(A.entries, i); it; ++it) acc += it.value() * cw[it.col()] * (u[i] - u[it.col()]);
    out[i] = scale * acc * inv_n / d[i];
  }
  return out;
}

LaplacianOperator truncate_dirichlet(const LaplacianOperator& L, const std::vector<double>& boundary_distance,
                                     double r) {
  if (L.kind == OperatorKind::TruncatedDirichlet) throw InvalidArgument("truncate_dirichlet: operator already truncated");
  if (!(r > 0.0)) throw InvalidArgument("truncate_dirichlet: radius must be positive");
  const Eigen::Index n = L.size();
  if (static_cast<Eigen::Index>(boundary_distance.size()) != n) {
    throw InvalidArgument("truncate_dirichlet: boundary distance length does not match the operator");
  }
  std::vector<Eigen::Index> kept;
  Eigen::VectorXi new_index = Eigen::VectorXi::Constant(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (boundary_distance[static_cast<std::size_t>(i)] > r) {
      new_index[i] = static_cast<int>(kept.size());
      kept.push_back(i);
    }
  }
  if (kept.empty()) throw EmptyTruncation("truncate_dirichlet: no point lies farther than r from the boundary");

  const auto n1 = static_cast<Eigen::Index>(kept.size());
  LaplacianOperator T = L;
  T.kind = OperatorKind::TruncatedDirichlet;
  T.kept_indices = kept;
  T.untouched_by_truncation = n1 == n;
  T.measure_weights.resize(n1);
  std::vector<SparseMatrix::StorageIndex> outer(static_cast<std::size_t>(n1) + 1, 0);
  std::vector<SparseMatrix::StorageIndex> inner;
  std::vector<double> values;
  for (Eigen::Index a = 0; a < n1; ++a) {
    const Eigen::Index i = kept[static_cast<std::size_t>(a)];
    T.measure_weights[a] = L.measure_weights[i];
    for (SparseMatrix::InnerIterator it(L.companion, i); it; ++it) {
      const int b = new_index[it.col()];
      if (b < 0) continue;
      inner.push_back(b);
      values.push_back(it.value());
    }
    outer[static_cast<std::size_t>(a) + 1] = static_cast<SparseMatrix::StorageIndex>(inner.size());
  }
  T.companion = Eigen::Map<const SparseMatrix>(n1, n1, static_cast<Eigen::Index>(inner.size()), outer.data(),
                                               inner.data(), values.data());
  return T;
}

double weighted_asymmetry(const LaplacianOperator& L) {
  const Eigen::VectorXd& w = L.measure_weights;
  double worst = 0.0, biggest = 0.0;
  for (Eigen::Index i = 0; i < L.size(); ++i) {
    for (SparseMatrix::InnerIterator it(L.companion, i); it; ++it) {
      const Eigen::Index j = it.col();
      const double a = w[i] * it.value();
      const double b = w[j] * L.companion.coeff(j, i);
      worst = std::max(worst, std::abs(a - b));
      biggest = std::max(biggest, std::abs(a));
    }
  }
  return biggest > 0.0 ? worst / biggest : 0.0;
}

}  // namespace tgl
