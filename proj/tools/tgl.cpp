// tgl: command-line front end for the graph-Laplacian spectral estimators.
//
// Exit status: 0 success, 2 invalid input or configuration, 3 eigensolver
// did not converge, 1 anything else.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tgl/error.hpp"
#include "tgl/experiment.hpp"
#include "tgl/io.hpp"
#include "tgl/kernel.hpp"
#include "tgl/nystrom.hpp"
#include "tgl/reference.hpp"
#include "tgl/sampler.hpp"

namespace fs = std::filesystem;

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config file (key = value lines)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Override base_seed");
  cmd->add_option("--out", f.out, "Override output_dir");
  cmd->add_option("--threads", f.threads, "Worker threads for trials");
}

tgl::ExperimentConfig load_config(const RunFlags& f) {
  auto c = tgl::ExperimentConfig::load(f.config);
  if (f.seed) c.base_seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.threads) c.threads = *f.threads;
  c.validate();
  return c;
}

int cmd_sample(const std::string& manifold, Eigen::Index n, const std::string& scheme, const std::string& density,
               std::uint64_t seed, const std::string& out) {
  const auto m = tgl::parse_manifold(manifold);
  const auto s = tgl::parse_scheme(scheme);
  tgl::PointCloud c;
  switch (m) {
    case tgl::Manifold::SemiCircle: c = tgl::sample_semicircle(n, s, tgl::parse_density(density), seed); break;
    case tgl::Manifold::SemiTorus: c = tgl::sample_semitorus(n, s, seed); break;
    case tgl::Manifold::Circle: c = tgl::sample_circle(n, s, seed); break;
  }
  tgl::io::write_cloud(out, c);
  std::cout << "wrote " << c.size() << " points to " << out << "\n";
  return 0;
}

int cmd_tune(const std::string& cloud_path, const std::string& manifold, Eigen::Index K, const std::string& out) {
  const auto cloud = tgl::io::read_cloud(cloud_path, tgl::parse_manifold(manifold));
  if (K <= 0) K = tgl::default_neighbor_count(cloud.size());
  const auto t = tgl::tune_bandwidth(cloud, K, tgl::default_bandwidth_grid());
  std::cout << "epsilon " << tgl::io::format_double(t.epsilon) << "\nd_estimate " << tgl::io::format_double(t.d_estimate)
            << "\n";
  if (!out.empty()) {
    nlohmann::json j = {{"epsilon", t.epsilon}, {"d_estimate", t.d_estimate}, {"K", K}, {"grid", t.grid}, {"log_sum", t.log_sum}};
    nlohmann::json slope = nlohmann::json::array();
    for (double s : t.slope) slope.push_back(std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr));
    j["slope"] = slope;
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    std::ofstream(out) << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_spectrum(const RunFlags& f) {
  const auto c = load_config(f);
  const auto run = tgl::run_spectrum(c);
  std::cout << "n " << run.n << "  n1 " << run.n1 << "  K " << run.K << "  epsilon " << tgl::io::format_double(run.epsilon)
            << "\n";
  for (const auto& e : run.errors.per_mode) {
    std::cout << "mode " << e.mode << "  lambda " << e.lambda_est << "  ref " << e.lambda_ref << "  "
              << (e.absolute ? "abs_err " : "rel_err ") << e.rel_err << "  vec_mse " << e.vec_mse << "\n";
  }
  std::cout << "mean_rel_eig_err " << run.errors.mean_rel_eig_err << "\nmean_vec_mse " << run.errors.mean_vec_mse << "\n";
  return 0;
}

int cmd_converge(const RunFlags& f) {
  const auto c = load_config(f);
  const auto run = tgl::run_convergence(c);
  for (std::size_t i = 0; i < run.fit.n_values.size(); ++i) {
    std::cout << "n " << run.fit.n_values[i] << "  eig " << run.fit.eig_mean[i] << "  vec " << run.fit.vec_mean[i] << "\n";
  }
  if (run.fitted) std::cout << "slope eig " << run.fit.eig.slope << "  vec " << run.fit.vec.slope << "\n";
  else std::cout << "fewer than three sizes; no slope fitted\n";
  return 0;
}

int cmd_reference(const std::string& manifold, const std::string& bc, Eigen::Index M, Eigen::Index n_theta,
                  const std::string& out) {
  const auto m = tgl::parse_manifold(manifold);
  const auto b = tgl::parse_boundary_condition(bc);
  tgl::ReferenceSpectrum r;
  if (m == tgl::Manifold::SemiTorus) {
    if (b != tgl::BoundaryCondition::Dirichlet) throw tgl::InvalidArgument("semitorus reference is Dirichlet only");
    r = tgl::semitorus_spectrum(M, n_theta);
  } else {
    if ((m == tgl::Manifold::Circle) != (b == tgl::BoundaryCondition::Closed)) {
      throw tgl::InvalidArgument("closed bc goes with the circle, dirichlet/neumann with the semicircle");
    }
    r = tgl::semicircle_spectrum(b, M);
  }
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    std::cout << k << "  m=" << r.angular_mode[static_cast<std::size_t>(k)] << "  " << r.eigenvalues[static_cast<std::size_t>(k)] << "\n";
  }
  if (!out.empty()) {
    const fs::path dir(out);
    fs::create_directories(dir);
    tgl::io::write_reference(dir / "reference.csv", r);
    if (m == tgl::Manifold::SemiTorus) {
      for (Eigen::Index k = 0; k < r.size(); ++k) {
        tgl::io::write_reference_grid(dir / ("mode_" + std::to_string(k) + ".csv"), r, k);
      }
    }
  }
  return 0;
}

// Rebuilds the operator of a finished spectrum run from its persisted cloud
// and resolved parameters, then extends the stored eigenvectors.
int cmd_extend(const std::string& run_dir, const std::string& queries_path, std::vector<Eigen::Index> modes,
               const std::string& out) {
  const fs::path dir(run_dir);
  auto config = tgl::ExperimentConfig::load(dir / "config.txt");
  nlohmann::json report;
  std::ifstream(dir / "report.json") >> report;
  const auto& res = report.at("resolved");
  const auto cloud = tgl::io::read_cloud(dir / "cloud.csv", config.manifold);
  const double eps = res.at("epsilon").get<double>();
  const auto K = res.at("K").get<Eigen::Index>();
  const int dim = tgl::intrinsic_dimension(config.manifold);
  const auto moments = tgl::moment_constants(dim);

  tgl::SparseAffinity A = tgl::build_affinity(cloud, K, eps);
  tgl::LaplacianOperator L;
  if (config.op == tgl::OperatorKind::SymmetricUniform) {
    L = tgl::assemble_symmetric_uniform(A, moments, config.scale_convention);
  } else {
    const auto q = tgl::estimate_density(A, cloud.boundary_distance, config.normalization, config.erf_argument);
    L = tgl::assemble_density_corrected(A, q, moments, config.scale_convention);
  }
  if (!res.at("r").is_null()) L = tgl::truncate_dirichlet(L, cloud.boundary_distance, res.at("r").get<double>());

  const auto table = tgl::io::read_spectrum(dir / "spectrum.csv");
  tgl::Spectrum s;
  s.eigenvalues = table.eigenvalues;
  s.sigma = table.sigma;
  s.residuals = table.residuals;
  s.eigenvectors = tgl::io::read_matrix(dir / "vectors.csv");
  if (modes.empty()) {
    for (Eigen::Index k = 0; k < s.sigma.size(); ++k) modes.push_back(k);
  }
  tgl::ExtensionContext ctx(cloud.ambient, std::move(A), L, s);
  const tgl::PointMatrix queries = tgl::io::read_points(queries_path);
  const Eigen::MatrixXd values = ctx.extend_batch(modes, queries);
  tgl::io::write_extension(out, modes, values);
  std::cout << "extended " << modes.size() << " modes to " << queries.rows() << " points\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-Laplacian estimates of Laplace-Beltrami spectra"};
  app.require_subcommand(1);

  std::string manifold = "semicircle", scheme = "grid", density = "uniform", out, bc = "dirichlet";
  Eigen::Index n = 1000, K = 0, M = 10, n_theta = 512;
  std::uint64_t seed = 0;

  auto* sample = app.add_subcommand("sample", "Sample a point cloud and write it as CSV");
  sample->add_option("--manifold", manifold, "semicircle | semitorus | circle");
  sample->add_option("--n", n, "Number of points")->required();
  sample->add_option("--scheme", scheme, "grid | random");
  sample->add_option("--density", density, "uniform | boundary_weighted");
  sample->add_option("--seed", seed, "Random seed");
  sample->add_option("--out", out, "Output CSV")->required();

  std::string cloud_path;
  auto* tune = app.add_subcommand("tune", "Pick a kernel bandwidth for a stored cloud");
  tune->add_option("--cloud", cloud_path, "Cloud CSV")->required()->check(CLI::ExistingFile);
  tune->add_option("--manifold", manifold, "Manifold the cloud was sampled from");
  tune->add_option("--K", K, "Neighbor count (default ceil(sqrt(n)))");
  tune->add_option("--out", out, "Optional JSON with the full tuning curve");

  RunFlags spectrum_flags, converge_flags;
  auto* spectrum = app.add_subcommand("spectrum", "Run one spectrum estimate and compare with the reference");
  add_run_flags(spectrum, spectrum_flags);
  auto* converge = app.add_subcommand("converge", "Run a convergence study over several n");
  add_run_flags(converge, converge_flags);

  auto* reference = app.add_subcommand("reference", "Print (and optionally tabulate) reference eigenpairs");
  reference->add_option("--manifold", manifold, "semicircle | semitorus | circle");
  reference->add_option("--bc", bc, "dirichlet | neumann | closed");
  reference->add_option("--M", M, "Number of modes");
  reference->add_option("--n-theta", n_theta, "Theta grid of the semi-torus solver");
  reference->add_option("--out", out, "Output directory");

  std::string run_dir, queries;
  std::vector<Eigen::Index> modes;
  auto* extend = app.add_subcommand("extend", "Nystrom-extend the eigenvectors of a spectrum run");
  extend->add_option("--run", run_dir, "Output directory of a spectrum run")->required()->check(CLI::ExistingDirectory);
  extend->add_option("--queries", queries, "CSV of ambient query points with a header line")->required()->check(CLI::ExistingFile);
  extend->add_option("--modes", modes, "Modes to extend (default all)")->delimiter(',');
  extend->add_option("--out", out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample) return cmd_sample(manifold, n, scheme, density, seed, out);
    if (*tune) return cmd_tune(cloud_path, manifold, K, out);
    if (*spectrum) return cmd_spectrum(spectrum_flags);
    if (*converge) return cmd_converge(converge_flags);
    if (*reference) return cmd_reference(manifold, bc, M, n_theta, out);
    if (*extend) return cmd_extend(run_dir, queries, modes, out);
  } catch (const tgl::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tgl::ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
