#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace tgl {

enum class Manifold { SemiCircle, SemiTorus, Circle };
enum class Scheme { Grid, Random };
enum class Density { Uniform, BoundaryWeighted };

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A finite sample of a benchmark manifold.
///
/// Row `i` of `ambient` is the embedded point, row `i` of `intrinsic` its
/// coordinates (theta for the circles, (theta, phi) for the semi-torus), and
/// `boundary_distance[i]` its geodesic distance to the boundary. Points on
/// the closed circle carry an infinite boundary distance.
struct PointCloud {
  Manifold manifold = Manifold::SemiCircle;
  Scheme scheme = Scheme::Grid;
  Density density = Density::Uniform;
  std::uint64_t seed = 0;
  PointMatrix ambient;
  PointMatrix intrinsic;
  std::vector<double> boundary_distance;

  Eigen::Index size() const noexcept { return ambient.rows(); }
  Eigen::Index ambient_dim() const noexcept { return ambient.cols(); }
  Eigen::Index intrinsic_dim() const noexcept { return intrinsic.cols(); }
};

/// Unit semi-circle {(cos t, sin t) : 0 <= t <= pi}.
///
/// Grid+Uniform places t_i = pi*i/(n+1), i = 1..n, so no point lies on the
/// boundary. BoundaryWeighted maps x in (0, pi/2) to t = pi*cos(x), with x
/// gridded the same way or drawn uniformly; this crowds samples near t = pi.
PointCloud sample_semicircle(Eigen::Index n, Scheme scheme, Density density, std::uint64_t seed);

/// Semi-torus ((2+cos t)cos p, (2+cos t)sin p, sin t), t in [0, 2pi), p in [0, pi].
///
/// Grid requires a perfect square n = s*s: t_i = 2*pi*i/s (i = 0..s-1) and
/// p_j = pi*j/(s+1) (j = 1..s), stored with t varying fastest. The boundary
/// distance is the length of the fixed-t path to the nearer edge,
/// (2+cos t)*min(p, pi-p), which is exact to O(b^2) for small b.
PointCloud sample_semitorus(Eigen::Index n, Scheme scheme, std::uint64_t seed);

/// (2+cos t)*min(p, pi-p): the distance recorded for semi-torus samples.
double semitorus_boundary_distance(double theta, double phi) noexcept;

/// Full unit circle; a closed manifold used for bc=closed runs.
PointCloud sample_circle(Eigen::Index n, Scheme scheme, std::uint64_t seed);

/// Largest |embedding equation| over the cloud.
double embedding_residual(const PointCloud& cloud);

std::string_view to_string(Manifold m) noexcept;
std::string_view to_string(Scheme s) noexcept;
std::string_view to_string(Density d) noexcept;
Manifold parse_manifold(std::string_view s);
Scheme parse_scheme(std::string_view s);
Density parse_density(std::string_view s);

/// Intrinsic dimension of a benchmark manifold.
int intrinsic_dimension(Manifold m) noexcept;

/// True if the manifold has a nonempty boundary.
bool has_boundary(Manifold m) noexcept;

}  // namespace tgl
