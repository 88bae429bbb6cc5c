#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "tgl/error.hpp"
#include "tgl/experiment.hpp"

namespace tgl {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "tgl_experiment_test" / name;
  fs::remove_all(d);
  return d;
}

TEST(Config, ParsesAllRules) {
  const auto c = ExperimentConfig::parse(R"(
    # comment
    manifold = semicircle
    n = 500, 1000, 2000
    scheme = random
    density = boundary_weighted
    bc = dirichlet
    M = 5
    epsilon = table:0.01,0.005,0.003
    K = scaled:10
    r = fixed:0.1
    trials = 3
    base_seed = 12
  )");
  EXPECT_EQ(c.n, (std::vector<Eigen::Index>{500, 1000, 2000}));
  EXPECT_EQ(c.density, Density::BoundaryWeighted);
  EXPECT_EQ(c.M, 5);
  EXPECT_EQ(resolve_epsilon(c.epsilon, 1, 1000).value(), 0.005);
  EXPECT_EQ(resolve_neighbor_count(c.K, 1000), 317);
  EXPECT_EQ(c.r.value, 0.1);
  EXPECT_EQ(c.trials, 3);
}

TEST(Config, EpsilonAndCountRules) {
  ExperimentConfig c;
  c.set("epsilon", "interp:1000=0.01,4000=0.0025");
  EXPECT_NEAR(resolve_epsilon(c.epsilon, 0, 2000).value(), 0.005, 1e-15);
  c.set("epsilon", "auto");
  EXPECT_FALSE(resolve_epsilon(c.epsilon, 0, 2000).has_value());
  c.set("K", "fixed:7");
  EXPECT_EQ(resolve_neighbor_count(c.K, 2000), 7);
  c.set("K", "sqrt_n");
  EXPECT_EQ(resolve_neighbor_count(c.K, 2000), 45);
}

TEST(Config, ValidationErrors) {
  EXPECT_THROW(ExperimentConfig::parse("manifold = circle\nbc = dirichlet\n").validate(), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::parse("n = 100, 200\nepsilon = table:0.1\n").validate(), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::parse("n = 100\nK = fixed:100\n").validate(), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::parse("colour = blue\n"), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::parse("n = many\n"), InvalidArgument);
  EXPECT_NO_THROW(ExperimentConfig::parse("manifold = circle\nbc = closed\n").validate());
}

TEST(Config, CanonicalFormAndHash) {
  const auto a = ExperimentConfig::parse("n = 100\nM = 3\noutput_dir = /tmp/a\n");
  const auto b = ExperimentConfig::parse("M = 3\nn = 100\noutput_dir = /tmp/b\nthreads = 4\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(ExperimentConfig::parse(a.canonical()).canonical(), a.canonical());
  EXPECT_NE(a.hash(), ExperimentConfig::parse("n = 100\nM = 4\n").hash());
}

ExperimentConfig small_run() {
  return ExperimentConfig::parse(R"(
    manifold = semicircle
    n = 400
    scheme = random
    bc = dirichlet
    M = 5
    epsilon = fixed:0.02
    K = scaled:3
    base_seed = 5
  )");
}

TEST(Experiment, SpectrumRunWritesArtifacts) {
  auto c = small_run();
  c.output_dir = fresh_dir("run").string();
  const auto run = run_spectrum(c);
  EXPECT_EQ(run.n1 + run.n0, 400);
  EXPECT_LT(run.errors.mean_rel_eig_err, 0.2);
  for (const char* f : {"cloud.csv", "spectrum.csv", "vectors.csv", "errors.csv", "reference.csv", "report.json",
                        "config.txt"}) {
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / f)) << f;
  }
  const auto report = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "report.json"));
  EXPECT_EQ(report["resolved"]["epsilon"].get<double>(), 0.02);
  EXPECT_EQ(report["resolved"]["n1"].get<int>() + report["resolved"]["n0"].get<int>(), 400);
  EXPECT_LE(report["solver"]["max_residual"].get<double>(), 1e-10);
  EXPECT_TRUE(report["wall_clock_seconds"].contains("solve"));
  EXPECT_EQ(report["config_hash"].get<std::string>(), c.hash());
}

TEST(Experiment, OutputsAreDeterministic) {
  auto c = small_run();
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  c.output_dir = a.string();
  run_spectrum(c);
  c.output_dir = b.string();
  run_spectrum(c);
  for (const char* f : {"cloud.csv", "spectrum.csv", "vectors.csv", "errors.csv", "reference.csv"}) {
    const std::string first = slurp(a / f);
    EXPECT_FALSE(first.empty()) << f;
    EXPECT_EQ(first, slurp(b / f)) << f;
  }
}

TEST(Experiment, ConvergenceRowsIndependentOfThreads) {
  auto c = small_run();
  c.n = {200, 300, 400};
  c.epsilon.mode = EpsilonRule::Mode::Auto;
  c.trials = 2;
  c.threads = 1;
  const auto one = run_convergence(c);
  c.threads = 3;
  const auto three = run_convergence(c);
  ASSERT_EQ(one.rows.size(), 6u);
  ASSERT_EQ(three.rows.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(one.rows[i].n, three.rows[i].n);
    EXPECT_EQ(one.rows[i].trial_seed, three.rows[i].trial_seed);
    EXPECT_EQ(one.rows[i].mean_rel_eig_err, three.rows[i].mean_rel_eig_err);
    if (i) EXPECT_LE(one.rows[i - 1].n, one.rows[i].n);
  }
  EXPECT_TRUE(one.fitted);
}

TEST(Experiment, SingleSizeSkipsFit) {
  auto c = small_run();
  c.trials = 2;
  c.output_dir = fresh_dir("single").string();
  const auto r = run_convergence(c);
  EXPECT_FALSE(r.fitted);
  EXPECT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "convergence.csv"));
}

TEST(Experiment, NeumannAndClosedRunsKeepEveryPoint) {
  auto c = small_run();
  c.bc = BoundaryCondition::Neumann;
  EXPECT_EQ(run_spectrum(c).n0, 0);
  c.manifold = Manifold::Circle;
  c.bc = BoundaryCondition::Closed;
  const auto closed = run_spectrum(c);
  EXPECT_EQ(closed.n1, 400);
  EXPECT_LT(std::abs(closed.spectrum.eigenvalues[0]), 0.2);
}

TEST(Experiment, SemitorusRunUsesComparisonGrid) {
  const auto c = ExperimentConfig::parse(R"(
    manifold = semitorus
    n = 900
    scheme = grid
    M = 3
    epsilon = fixed:0.05
    grid = 16
  )");
  const auto run = run_spectrum(c);
  EXPECT_EQ(run.errors.per_mode.size(), 3u);
  EXPECT_LT(run.errors.mean_rel_eig_err, 0.5);
}

}  // namespace
}  // namespace tgl
