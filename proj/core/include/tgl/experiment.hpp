#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgl/eigensolver.hpp"
#include "tgl/kernel.hpp"
#include "tgl/laplacian.hpp"
#include "tgl/metrics.hpp"
#include "tgl/reference.hpp"
#include "tgl/sampler.hpp"

namespace tgl {

struct EpsilonRule {
  enum class Mode { Auto, Fixed, Table, Interp };
  Mode mode = Mode::Auto;
  double value = 0.0;                             // Fixed
  std::vector<double> table;                      // Table: one value per entry of `n`
  std::vector<std::pair<double, double>> points;  // Interp: (n, eps), log-log linear
};

struct CountRule {
  enum class Mode { SqrtN, Fixed, Scaled };
  Mode mode = Mode::SqrtN;
  double value = 0.0;  // Fixed: K itself; Scaled: K = ceil(value * sqrt(n))
};

struct RadiusRule {
  enum class Mode { SqrtEps, Fixed };
  Mode mode = Mode::SqrtEps;
  double value = 0.0;
};

/// Parameters of one spectrum run or convergence study.
///
/// The text form is one `key = value` per line; `#` starts a comment. Keys:
///   manifold        semicircle | semitorus | circle
///   n               size or comma-separated list of sizes
///   scheme          grid | random
///   density         uniform | boundary_weighted
///   bc              dirichlet | neumann | closed
///   M               number of eigenpairs (default 10)
///   epsilon         auto | fixed:<eps> | table:<eps,...> | interp:<n>=<eps>,...
///   K               sqrt_n | fixed:<k> | scaled:<c>   (scaled: ceil(c sqrt(n)))
///   r               sqrt_eps | fixed:<r>
///   normalization   boundary_corrected | constant_m0
///   operator        density_corrected | symmetric_uniform
///   trials, base_seed, output_dir, threads
///   match           index | value
///   erf_argument    sqrt_eps | eps
///   scale           consistent | literal
///   n_theta         reference theta grid (default 512)
///   grid            comparison grid side for the semi-torus (default 64)
///   grid_weight     plain | volume
///   cluster_tol     relative gap below which reference modes are one cluster
///   tol, max_restarts, filter_degree, krylov_dim   eigensolver controls
struct ExperimentConfig {
  Manifold manifold = Manifold::SemiCircle;
  std::vector<Eigen::Index> n{1000};
  Scheme scheme = Scheme::Grid;
  Density density = Density::Uniform;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  Eigen::Index M = 10;
  EpsilonRule epsilon;
  CountRule K;
  RadiusRule r;
  Normalization normalization = Normalization::BoundaryCorrected;
  OperatorKind op = OperatorKind::DensityCorrected;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::string output_dir;
  MatchStrategy match = MatchStrategy::Index;
  ErfArgument erf_argument = ErfArgument::SqrtEpsilon;
  ScaleConvention scale_convention = ScaleConvention::Consistent;
  Eigen::Index n_theta = 512;
  Eigen::Index grid = 64;
  bool volume_weighted_grid = false;
  double cluster_tol = 1e-6;
  EigenOptions eigen;
  int threads = 1;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Applies one `key = value` setting.
  void set(std::string_view key, std::string_view value);

  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;

  /// Sorted key = value lines describing every setting.
  std::string canonical() const;
  /// 64-bit FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
};

Eigen::Index resolve_neighbor_count(const CountRule& rule, Eigen::Index n);
/// eps for n = config.n[index], or nullopt when it must be tuned.
std::optional<double> resolve_epsilon(const EpsilonRule& rule, std::size_t index, Eigen::Index n);

struct StageTimes {
  double sample = 0, neighbors = 0, tune = 0, assemble = 0, solve = 0, reference = 0, compare = 0;
  double total() const { return sample + neighbors + tune + assemble + solve + reference + compare; }
};

struct SpectrumRun {
  Eigen::Index n = 0;
  Eigen::Index K = 0;
  Eigen::Index n1 = 0;
  Eigen::Index n0 = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::optional<double> d_estimate;
  std::optional<double> r;
  bool untouched_by_truncation = false;
  PointCloud cloud;
  Spectrum spectrum;
  ReferenceSpectrum reference;
  ErrorReport errors;
  double max_residual = 0.0;
  StageTimes times;
};

/// Sample, build, solve and compare once for size n with the given seed.
SpectrumRun run_single(const ExperimentConfig& config, std::size_t n_index, std::uint64_t seed);

/// run_single on the first size with seed base_seed. Writes cloud.csv,
/// spectrum.csv, vectors.csv, errors.csv, reference.csv and report.json
/// when output_dir is set.
SpectrumRun run_spectrum(const ExperimentConfig& config);

struct ConvergenceRun {
  std::vector<ConvergenceRow> rows;  // sorted by (n, trial)
  std::vector<int> trial_index;
  std::vector<Eigen::Index> n1;
  std::vector<double> max_residual;
  std::vector<StageTimes> times;
  ConvergenceFit fit;
  bool fitted = false;
};

/// Every (n, trial) pair with seed derive_trial_seed(base_seed, n, trial),
/// spread over `threads` workers. Writes convergence.csv,
/// convergence_by_n.csv and report.json when output_dir is set.
ConvergenceRun run_convergence(const ExperimentConfig& config);

}  // namespace tgl
