#include "tgl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tgl/error.hpp"
#include "tgl/rng.hpp"

namespace tgl {

namespace {

using std::numbers::pi;

PointCloud make_cloud(Manifold m, Scheme s, Density d, std::uint64_t seed, Eigen::Index n) {
  PointCloud cloud;
  cloud.manifold = m;
  cloud.scheme = s;
  cloud.density = d;
  cloud.seed = seed;
  const Eigen::Index amb = m == Manifold::SemiTorus ? 3 : 2;
  const Eigen::Index intr = m == Manifold::SemiTorus ? 2 : 1;
  cloud.ambient.resize(n, amb);
  cloud.intrinsic.resize(n, intr);
  cloud.boundary_distance.resize(static_cast<std::size_t>(n));
  return cloud;
}

}  // namespace

PointCloud sample_semicircle(Eigen::Index n, Scheme scheme, Density density, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("sample_semicircle: n must be at least 2");
  PointCloud cloud = make_cloud(Manifold::SemiCircle, scheme, density, seed, n);
  CounterRng rng(seed);
  const double denom = static_cast<double>(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double theta = 0.0;
    if (density == Density::Uniform) {
      theta = scheme == Scheme::Grid ? pi * static_cast<double>(i + 1) / denom : pi * rng.uniform_open();
    } else {
      const double x = scheme == Scheme::Grid ? 0.5 * pi * static_cast<double>(i + 1) / denom
                                              : 0.5 * pi * rng.uniform_open();
      theta = pi * std::cos(x);
    }
    cloud.intrinsic(i, 0) = theta;
    cloud.ambient(i, 0) = std::cos(theta);
    cloud.ambient(i, 1) = std::sin(theta);
    cloud.boundary_distance[static_cast<std::size_t>(i)] = std::min(theta, pi - theta);
  }
  return cloud;
}

PointCloud sample_semitorus(Eigen::Index n, Scheme scheme, std::uint64_t seed) {
  if (n < 4) throw InvalidArgument("sample_semitorus: n must be at least 4");
  PointCloud cloud = make_cloud(Manifold::SemiTorus, scheme, Density::Uniform, seed, n);

  auto place = [&cloud](Eigen::Index i, double theta, double phi) {
    const double w = 2.0 + std::cos(theta);
    cloud.intrinsic(i, 0) = theta;
    cloud.intrinsic(i, 1) = phi;
    cloud.ambient(i, 0) = w * std::cos(phi);
    cloud.ambient(i, 1) = w * std::sin(phi);
    cloud.ambient(i, 2) = std::sin(theta);
    cloud.boundary_distance[static_cast<std::size_t>(i)] = semitorus_boundary_distance(theta, phi);
  };

  if (scheme == Scheme::Grid) {
    const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) {
      throw InvalidArgument("sample_semitorus: grid scheme needs a perfect-square n, got " + std::to_string(n));
    }
    for (Eigen::Index j = 0; j < side; ++j) {
      const double phi = pi * static_cast<double>(j + 1) / static_cast<double>(side + 1);
      for (Eigen::Index i = 0; i < side; ++i) {
        place(j * side + i, 2.0 * pi * static_cast<double>(i) / static_cast<double>(side), phi);
      }
    }
  } else {
    CounterRng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double theta = rng.uniform(0.0, 2.0 * pi);
      const double phi = pi * rng.uniform_open();
      place(i, theta, phi);
    }
  }
  return cloud;
}

PointCloud sample_circle(Eigen::Index n, Scheme scheme, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("sample_circle: n must be at least 2");
  PointCloud cloud = make_cloud(Manifold::Circle, scheme, Density::Uniform, seed, n);
  CounterRng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = scheme == Scheme::Grid ? 2.0 * pi * static_cast<double>(i) / static_cast<double>(n)
                                                : rng.uniform(0.0, 2.0 * pi);
    cloud.intrinsic(i, 0) = theta;
    cloud.ambient(i, 0) = std::cos(theta);
    cloud.ambient(i, 1) = std::sin(theta);
    cloud.boundary_distance[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
  }
  return cloud;
}

double semitorus_boundary_distance(double theta, double phi) noexcept {
  return (2.0 + std::cos(theta)) * std::min(phi, std::numbers::pi - phi);
}

double embedding_residual(const PointCloud& cloud) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    double r = 0.0;
    if (cloud.manifold == Manifold::SemiTorus) {
      const double x = cloud.ambient(i, 0), y = cloud.ambient(i, 1), z = cloud.ambient(i, 2);
      const double rho = std::sqrt(x * x + y * y) - 2.0;
      r = rho * rho + z * z - 1.0;
    } else {
      const double x = cloud.ambient(i, 0), y = cloud.ambient(i, 1);
      r = x * x + y * y - 1.0;
    }
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

std::string_view to_string(Manifold m) noexcept {
  switch (m) {
    case Manifold::SemiCircle: return "semicircle";
    case Manifold::SemiTorus: return "semitorus";
    case Manifold::Circle: return "circle";
  }
  return "?";
}

std::string_view to_string(Scheme s) noexcept { return s == Scheme::Grid ? "grid" : "random"; }

std::string_view to_string(Density d) noexcept {
  return d == Density::Uniform ? "uniform" : "boundary_weighted";
}

Manifold parse_manifold(std::string_view s) {
  if (s == "semicircle") return Manifold::SemiCircle;
  if (s == "semitorus") return Manifold::SemiTorus;
  if (s == "circle") return Manifold::Circle;
  throw InvalidArgument("unknown manifold '" + std::string(s) + "'");
}

Scheme parse_scheme(std::string_view s) {
  if (s == "grid") return Scheme::Grid;
  if (s == "random") return Scheme::Random;
  throw InvalidArgument("unknown scheme '" + std::string(s) + "'");
}

Density parse_density(std::string_view s) {
  if (s == "uniform") return Density::Uniform;
  if (s == "boundary_weighted") return Density::BoundaryWeighted;
  throw InvalidArgument("unknown density '" + std::string(s) + "'");
}

int intrinsic_dimension(Manifold m) noexcept { return m == Manifold::SemiTorus ? 2 : 1; }

bool has_boundary(Manifold m) noexcept { return m != Manifold::Circle; }

}  // namespace tgl
