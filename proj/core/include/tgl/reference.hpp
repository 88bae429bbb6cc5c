#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "tgl/sampler.hpp"

namespace tgl {

enum class BoundaryCondition { Dirichlet, Neumann, Closed };

std::string_view to_string(BoundaryCondition bc) noexcept;
BoundaryCondition parse_boundary_condition(std::string_view s);

/// Ground-truth Laplace-Beltrami eigenpairs, ascending.
///
/// Eigenfunctions are unit-norm in L2 of the Riemannian volume. For the
/// semi-circle they are closed-form in theta; for the semi-torus they are
/// Theta_k(theta) * sin(m_k phi) with Theta_k tabulated on a periodic theta
/// grid and interpolated linearly between nodes.
struct ReferenceSpectrum {
  Manifold manifold = Manifold::SemiCircle;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::vector<double> eigenvalues;
  std::vector<int> angular_mode;  // k for circles, m for the semi-torus
  Eigen::VectorXd theta_grid;     // semi-torus only
  Eigen::MatrixXd profiles;       // semi-torus only: column k is Theta_k on theta_grid

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(eigenvalues.size()); }

  /// f_mode at one point given by intrinsic coordinates.
  double evaluate(Eigen::Index mode, const double* intrinsic) const;

  /// Rows are points, columns modes 0..M-1.
  Eigen::MatrixXd evaluate(const PointMatrix& intrinsic, Eigen::Index M) const;
};

/// Dirichlet: k^2 with sqrt(2/pi) sin(k t). Neumann: 0, 1, 4, ... with
/// 1/sqrt(pi) and sqrt(2/pi) cos(k t). Closed: the full unit circle, 0, 1, 1,
/// 4, 4, ... with 1/sqrt(2 pi), cos(k t)/sqrt(pi), sin(k t)/sqrt(pi).
ReferenceSpectrum semicircle_spectrum(BoundaryCondition bc, Eigen::Index M);

/// Eigenpairs of -(1/w)(w u')' + V u on a periodic grid of `n` points over
/// [0, 2 pi), discretized in flux form and symmetrized with w^{1/2}.
/// Returns ascending eigenvalues and w-orthonormal profiles (h sum w u^2 = 1).
struct PeriodicSturmLiouville {
  Eigen::VectorXd grid;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;
};
PeriodicSturmLiouville solve_periodic_sturm_liouville(const std::function<double(double)>& w,
                                                      const std::function<double(double)>& potential,
                                                      Eigen::Index n, Eigen::Index count);

/// Dirichlet spectrum of the semi-torus by separation of variables; the
/// theta equation for angular mode m is -(1/w)(w T')' + m^2/w^2 T = lambda T
/// with w = 2 + cos(theta).
ReferenceSpectrum semitorus_spectrum(Eigen::Index M, Eigen::Index n_theta = 512);

/// The s x s intrinsic comparison grid: theta_i = 2 pi i / s, phi_j = pi j / (s+1),
/// theta varying fastest.
PointMatrix semitorus_comparison_grid(Eigen::Index s = 64);

/// Embeds semi-torus intrinsic coordinates.
PointMatrix embed_semitorus(const PointMatrix& intrinsic);

}  // namespace tgl
