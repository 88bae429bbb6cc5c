#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "tgl/laplacian.hpp"

namespace tgl {

enum class NormKind { EmpiricalUniform, EmpiricalWeighted };

struct EigenOptions {
  double tol = 1e-10;          // on the kernel-side residual |S y - sigma y|
  Eigen::Index krylov_dim = 0; // 0: min(n, 4M + 40)
  int max_restarts = 50;
  int filter_degree = 0;       // Chebyshev filter degree; 0 picks one from a first pass, 1 disables
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

/// Eigenpairs of a Laplacian, ascending in lambda.
///
/// Column k of `eigenvectors` is normalized so (1/n_a) sum_i w_i u_i^2 = 1 and
/// its first nonzero entry is positive. `sigma` holds the kernel-side values,
/// lambda = scale * (1 - sigma). `residuals` are |C u - sigma u|_w / |u|_w,
/// i.e. the Laplacian residual divided by `scale`.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd residuals;
  NormKind norm_kind = NormKind::EmpiricalUniform;

  OperatorKind kind = OperatorKind::SymmetricUniform;
  double epsilon = 0.0;
  double scale = 0.0;
  Eigen::VectorXd measure_weights;
  std::vector<Eigen::Index> kept_indices;
  Eigen::Index parent_size = 0;

  int restarts = 0;
  long long matvecs = 0;
  int filter_degree = 1;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }
};

/// Largest eigenpairs of a symmetric sparse matrix, descending.
struct SymmetricEigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // orthonormal columns
  Eigen::VectorXd residuals;
  int restarts = 0;
  long long matvecs = 0;
  int filter_degree = 1;
};

SymmetricEigenResult largest_eigenpairs(const SparseMatrix& S, Eigen::Index M, const EigenOptions& options = {});

/// Symmetric similarity transform diag(w)^{1/2} C diag(w)^{-1/2}. Throws
/// InvalidOperator if diag(w) C is not symmetric to within `tol` relative.
SparseMatrix symmetrized_companion(const LaplacianOperator& L, double tol = 1e-10);

Spectrum smallest_eigenpairs(const LaplacianOperator& L, Eigen::Index M, const EigenOptions& options = {});

inline constexpr Eigen::Index kDenseLimit = 3000;

/// Full dense decomposition; same conventions as smallest_eigenpairs.
Spectrum dense_eig(const LaplacianOperator& L);

/// Wraps an explicit Laplacian matrix (with weights w making diag(w) L
/// symmetric) as an operator with kernel side C = I - L / scale.
LaplacianOperator operator_from_matrix(const SparseMatrix& laplacian, const Eigen::VectorXd& weights,
                                       double scale = 1.0);

}  // namespace tgl
