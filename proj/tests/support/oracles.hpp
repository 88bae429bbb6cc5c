#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "tgl/sampler.hpp"

namespace tgl::oracle {

/// Composite Simpson rule on [a, b] with `panels` (even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000);

/// Integral of f over R^d for d <= 3, truncated to [-L, L]^d.
double integrate_rd(const std::function<double(const double*)>& f, int d, double L = 9.0, int panels = 400);

/// Indices of the k nearest rows by a full sort of (distance, index).
std::vector<Eigen::Index> knn_by_sort(const PointMatrix& points, const double* query, Eigen::Index k,
                                      Eigen::Index exclude);

/// Geodesic distance from (theta, phi) to the semi-torus boundary, by
/// multi-source Dijkstra over an intrinsic grid with a 16-direction stencil.
class SemitorusGeodesic {
 public:
  SemitorusGeodesic(int n_theta, int n_phi);
  /// Distance at the grid node nearest to (theta, phi).
  double distance(double theta, double phi) const;
  double spacing() const;

 private:
  int nt_, np_;
  std::vector<double> dist_;
};

/// Eigenvalues of -u'' on (0, pi) from a second-order finite-difference
/// discretization with N cells, ascending, first `count`.
std::vector<double> fd_interval_spectrum(bool neumann, int N, int count);

/// Semi-torus theta-equation eigenvalues for angular mode m by Fourier
/// Galerkin with modes -K..K, first `count` ascending.
std::vector<double> galerkin_theta_spectrum(int m, int K, int count);

/// Dirichlet eigenvalues of the semi-torus merged over m = 1.., first M.
std::vector<double> galerkin_semitorus_spectrum(int M, int K = 48);

}  // namespace tgl::oracle
