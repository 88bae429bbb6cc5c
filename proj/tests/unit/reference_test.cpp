#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tgl/error.hpp"
#include "tgl/reference.hpp"

namespace tgl {
namespace {

using std::numbers::pi;

TEST(Reference, SemicircleValues) {
  const auto d = semicircle_spectrum(BoundaryCondition::Dirichlet, 3);
  EXPECT_EQ(d.eigenvalues, (std::vector<double>{1, 4, 9}));
  const auto n = semicircle_spectrum(BoundaryCondition::Neumann, 1);
  EXPECT_EQ(n.eigenvalues, (std::vector<double>{0}));
  const double t1 = 0.3, t2 = 2.0;
  EXPECT_NEAR(n.evaluate(0, &t1), 1 / std::sqrt(pi), 1e-15);
  EXPECT_NEAR(n.evaluate(0, &t2), 1 / std::sqrt(pi), 1e-15);
  const auto c = semicircle_spectrum(BoundaryCondition::Closed, 5);
  EXPECT_EQ(c.eigenvalues, (std::vector<double>{0, 1, 1, 4, 4}));
}

TEST(Reference, SemicircleMatchesFiniteDifferences) {
  const auto fd_n = oracle::fd_interval_spectrum(true, 2000, 10);
  const auto fd_d = oracle::fd_interval_spectrum(false, 2000, 10);
  const auto n = semicircle_spectrum(BoundaryCondition::Neumann, 10);
  const auto d = semicircle_spectrum(BoundaryCondition::Dirichlet, 10);
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(n.eigenvalues[static_cast<std::size_t>(k)], fd_n[static_cast<std::size_t>(k)], 2e-3 * std::max(1.0, fd_n[k]));
    EXPECT_NEAR(d.eigenvalues[static_cast<std::size_t>(k)], fd_d[static_cast<std::size_t>(k)], 2e-3 * fd_d[k]);
  }
  EXPECT_NEAR(fd_n[2], 4.0, 1e-5);
}

TEST(Reference, SemicircleEigenfunctions) {
  const auto d = semicircle_spectrum(BoundaryCondition::Dirichlet, 6);
  for (Eigen::Index k = 0; k < 6; ++k) {
    const double zero = 0.0, end = pi;
    EXPECT_NEAR(d.evaluate(k, &zero), 0.0, 1e-10);
    EXPECT_NEAR(d.evaluate(k, &end), 0.0, 1e-10);
    const double norm = oracle::simpson(
        [&](double t) {
          const double f = d.evaluate(k, &t);
          return f * f;
        },
        0, pi, 2000);
    EXPECT_NEAR(norm, 1.0, 1e-10);
  }
}

TEST(Reference, ClosedOrderingAndNeumannNorms) {
  const auto c = semicircle_spectrum(BoundaryCondition::Closed, 3);
  const double t = 0.4;
  EXPECT_NEAR(c.evaluate(1, &t), std::cos(t) / std::sqrt(pi), 1e-15);
  EXPECT_NEAR(c.evaluate(2, &t), std::sin(t) / std::sqrt(pi), 1e-15);
  const auto n = semicircle_spectrum(BoundaryCondition::Neumann, 4);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double norm = oracle::simpson(
        [&](double s) {
          const double f = n.evaluate(k, &s);
          return f * f;
        },
        0, pi, 2000);
    EXPECT_NEAR(norm, 1.0, 1e-10);
  }
}

TEST(Reference, FlatPeriodicProblem) {
  const auto s = solve_periodic_sturm_liouville([](double) { return 2.0; }, [](double) { return 0.25; }, 256, 3);
  EXPECT_NEAR(s.eigenvalues[0], 0.25, 1e-10);
  EXPECT_NEAR(s.eigenvalues[1], 1.25, 1e-4);
  EXPECT_NEAR(s.eigenvalues[2], 1.25, 1e-4);
}

TEST(Reference, SemitorusMatchesGalerkin) {
  const auto ref = semitorus_spectrum(10, 512);
  const auto gal = oracle::galerkin_semitorus_spectrum(10);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(ref.eigenvalues[k], gal[k], 1e-4 * gal[k]) << k;
  EXPECT_TRUE(std::is_sorted(ref.eigenvalues.begin(), ref.eigenvalues.end()));
}

TEST(Reference, SemitorusFrozenValues) {
  // Fourier-Galerkin with 97 modes; unchanged at 129 modes to 1e-11
  const double frozen[] = {0.249368056941, 0.794567801633, 1.263716946707, 1.545150827735, 1.663014537743,
                           2.040618148755, 2.514200194184, 3.153238556069, 3.175251354291, 3.705426893369};
  const auto ref = semitorus_spectrum(10, 512);
  EXPECT_EQ(std::vector<int>(ref.angular_mode.begin(), ref.angular_mode.begin() + 3), (std::vector<int>{1, 2, 1}));
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(ref.eigenvalues[k], frozen[k], 1e-4 * frozen[k]) << k;
}

TEST(Reference, SemitorusIncreasesWithAngularMode) {
  for (int m = 1; m < 6; ++m) {
    EXPECT_LT(oracle::galerkin_theta_spectrum(m, 32, 1)[0], oracle::galerkin_theta_spectrum(m + 1, 32, 1)[0]);
  }
  const auto ref = semitorus_spectrum(20, 256);
  for (std::size_t a = 0; a < ref.eigenvalues.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (ref.angular_mode[a] == ref.angular_mode[b]) EXPECT_LT(ref.eigenvalues[b], ref.eigenvalues[a]);
}

TEST(Reference, RichardsonSecondOrder) {
  const double l256 = semitorus_spectrum(1, 256).eigenvalues[0];
  const double l512 = semitorus_spectrum(1, 512).eigenvalues[0];
  const double l1024 = semitorus_spectrum(1, 1024).eigenvalues[0];
  const double ratio = (l256 - l512) / (l512 - l1024);
  EXPECT_NEAR(ratio, 4.0, 0.05);
}

TEST(Reference, ProfilesAreWeightedOrthonormal) {
  const auto s = solve_periodic_sturm_liouville([](double t) { return 2.0 + std::cos(t); },
                                                [](double t) { return 4.0 / std::pow(2.0 + std::cos(t), 2); }, 512, 4);
  const double h = 2 * pi / 512;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b <= a; ++b) {
      double ip = 0.0;
      for (int i = 0; i < 512; ++i) ip += h * (2.0 + std::cos(s.grid[i])) * s.vectors(i, a) * s.vectors(i, b);
      EXPECT_NEAR(ip, a == b ? 1.0 : 0.0, 1e-8);
    }
    EXPECT_GE(s.eigenvalues[a], 0.0);
  }
}

TEST(Reference, SemitorusEigenfunctionsAreUnitAndVanishOnTheBoundary) {
  const auto ref = semitorus_spectrum(4, 512);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double edge[2] = {1.0, 0.0};
    EXPECT_NEAR(ref.evaluate(k, edge), 0.0, 1e-12);
    const double norm = oracle::simpson(
        [&](double t) {
          return oracle::simpson(
              [&](double p) {
                const double x[2] = {t, p};
                const double f = ref.evaluate(k, x);
                return (2.0 + std::cos(t)) * f * f;
              },
              0, pi, 200);
        },
        0, 2 * pi, 1024);
    EXPECT_NEAR(norm, 1.0, 1e-3) << k;
  }
}

TEST(Reference, ComparisonGrid) {
  const PointMatrix g = semitorus_comparison_grid(4);
  ASSERT_EQ(g.rows(), 16);
  EXPECT_NEAR(g(1, 0), pi / 2, 1e-15);
  EXPECT_NEAR(g(1, 1), pi / 5, 1e-15);
  EXPECT_NEAR(g(4, 1), 2 * pi / 5, 1e-15);
}

TEST(Reference, ParseBoundaryCondition) {
  EXPECT_EQ(parse_boundary_condition("neumann"), BoundaryCondition::Neumann);
  EXPECT_EQ(to_string(BoundaryCondition::Closed), "closed");
  EXPECT_THROW(parse_boundary_condition("robin"), InvalidArgument);
}

}  // namespace
}  // namespace tgl
