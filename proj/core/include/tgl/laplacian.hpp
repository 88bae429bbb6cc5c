#pragma once

#include <vector>

#include <Eigen/Core>

#include "tgl/kernel.hpp"

namespace tgl {

enum class OperatorKind { SymmetricUniform, DensityCorrected, TruncatedDirichlet };
enum class Normalization { BoundaryCorrected, ConstantM0 };

/// How the Laplacian prefactor is formed from the kernel moments.
enum class ScaleConvention {
  Consistent,  // 2 m0 / (m2 eps): the degree-normalized kernel leaves a factor m0
  Literal,     // 2 / (m2 eps)
};

/// L = scale * (I - C) for a sparse kernel-side matrix C.
///
/// C_ij = A_ij * cw_j * (1/(2 rn_i) + 1/(2 rn_j)) / n, with cw and rn held over
/// the full parent cloud. The uniform form has cw = 1 and rn = degree sums;
/// the density-corrected form has cw = 1/q and rn_i = (1/n) sum_k A_ik / q_k.
/// In both cases diag(w) C is symmetric, w being `measure_weights`.
///
/// After truncation `companion` is the sub-block on `kept_indices`, while
/// `column_weights` and `row_normalizers` still cover all parent points.
struct LaplacianOperator {
  OperatorKind kind = OperatorKind::SymmetricUniform;
  OperatorKind base_kind = OperatorKind::SymmetricUniform;
  SparseMatrix companion;
  double epsilon = 0.0;
  double m2 = 0.0;
  int dim = 1;
  double scale = 0.0;
  Eigen::VectorXd measure_weights;
  std::vector<Eigen::Index> kept_indices;
  Eigen::Index parent_size = 0;
  Eigen::VectorXd column_weights;
  Eigen::VectorXd row_normalizers;
  bool untouched_by_truncation = false;

  Eigen::Index size() const noexcept { return companion.rows(); }

  /// The assembled Laplacian scale * (I - C).
  SparseMatrix matrix() const;
};

struct DensityEstimate {
  Eigen::VectorXd values;
  double epsilon = 0.0;
  Normalization normalization = Normalization::BoundaryCorrected;
};

Eigen::VectorXd degree_sums(const SparseAffinity& A);

DensityEstimate estimate_density(const SparseAffinity& A, const std::vector<double>& boundary_distance,
                                 Normalization normalization, ErfArgument arg = ErfArgument::SqrtEpsilon);

double laplacian_scale(const MomentConstants& m, double epsilon, ScaleConvention convention);

LaplacianOperator assemble_symmetric_uniform(const SparseAffinity& A, const MomentConstants& m,
                                             ScaleConvention convention = ScaleConvention::Consistent);

LaplacianOperator assemble_density_corrected(const SparseAffinity& A, const DensityEstimate& q,
                                             const MomentConstants& m,
                                             ScaleConvention convention = ScaleConvention::Consistent);

/// Random-walk operator R u = scale * (u_i - sum_j P_ij u_j) with
/// P_ij = A_ij / q_j / sum_k (A_ik / q_k), evaluated as a weighted sum of
/// differences so R 1 = 0 holds exactly.
Eigen::VectorXd apply_random_walk(const SparseAffinity& A, const DensityEstimate& q, const MomentConstants& m,
                                  const Eigen::VectorXd& u,
                                  ScaleConvention convention = ScaleConvention::Consistent);

/// Keeps the points with boundary_distance > r. Normalization sums are not
/// recomputed: the block is cut from the operator assembled on all points.
LaplacianOperator truncate_dirichlet(const LaplacianOperator& L, const std::vector<double>& boundary_distance, double r);

/// max |w_i C_ij - w_j C_ji| / max |w_i C_ij|.
double weighted_asymmetry(const LaplacianOperator& L);

}  // namespace tgl
