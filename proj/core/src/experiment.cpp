#include "tgl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tgl/error.hpp"
#include "tgl/io.hpp"
#include "tgl/nystrom.hpp"
#include "tgl/rng.hpp"

namespace tgl {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw InvalidArgument("config: bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &pos);
  } catch (const std::exception&) {
    bad(key, v);
  }
  if (pos != s.size() || !std::isfinite(x)) bad(key, v);
  return x;
}

long long to_int(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(s, &pos);
  } catch (const std::exception&) {
    bad(key, v);
  }
  if (pos != s.size()) bad(key, v);
  return x;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    if (!s.empty() && s.front() == '-') bad(key, v);
    x = std::stoull(s, &pos, 0);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const std::exception&) {
    bad(key, v);
  }
  if (pos != s.size()) bad(key, v);
  return x;
}

std::string fmt(double v) { return io::format_double(v); }

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  if (key == "manifold") {
    manifold = parse_manifold(v);
  } else if (key == "n") {
    n.clear();
    for (auto part : split(v, ',')) n.push_back(static_cast<Eigen::Index>(to_int(key, part)));
  } else if (key == "scheme") {
    scheme = parse_scheme(v);
  } else if (key == "density") {
    density = parse_density(v);
  } else if (key == "bc") {
    bc = parse_boundary_condition(v);
  } else if (key == "M") {
    M = static_cast<Eigen::Index>(to_int(key, v));
  } else if (key == "epsilon") {
    epsilon = {};
    if (v == "auto") {
      epsilon.mode = EpsilonRule::Mode::Auto;
    } else if (v.starts_with("fixed:")) {
      epsilon.mode = EpsilonRule::Mode::Fixed;
      epsilon.value = to_double(key, v.substr(6));
    } else if (v.starts_with("table:")) {
      epsilon.mode = EpsilonRule::Mode::Table;
      for (auto part : split(v.substr(6), ',')) epsilon.table.push_back(to_double(key, part));
    } else if (v.starts_with("interp:")) {
      epsilon.mode = EpsilonRule::Mode::Interp;
      for (auto part : split(v.substr(7), ',')) {
        const auto kv = split(part, '=');
        if (kv.size() != 2) bad(key, v);
        epsilon.points.emplace_back(to_double(key, kv[0]), to_double(key, kv[1]));
      }
      std::sort(epsilon.points.begin(), epsilon.points.end());
    } else {
      bad(key, v);
    }
  } else if (key == "K") {
    K = {};
    if (v == "sqrt_n") {
      K.mode = CountRule::Mode::SqrtN;
    } else if (v.starts_with("fixed:")) {
      K.mode = CountRule::Mode::Fixed;
      K.value = static_cast<double>(to_int(key, v.substr(6)));
    } else if (v.starts_with("scaled:")) {
      K.mode = CountRule::Mode::Scaled;
      K.value = to_double(key, v.substr(7));
    } else {
      bad(key, v);
    }
  } else if (key == "r") {
    r = {};
    if (v == "sqrt_eps") {
      r.mode = RadiusRule::Mode::SqrtEps;
    } else if (v.starts_with("fixed:")) {
      r.mode = RadiusRule::Mode::Fixed;
      r.value = to_double(key, v.substr(6));
    } else {
      bad(key, v);
    }
  } else if (key == "normalization") {
    if (v == "boundary_corrected") normalization = Normalization::BoundaryCorrected;
    else if (v == "constant_m0") normalization = Normalization::ConstantM0;
    else bad(key, v);
  } else if (key == "operator") {
    if (v == "density_corrected") op = OperatorKind::DensityCorrected;
    else if (v == "symmetric_uniform") op = OperatorKind::SymmetricUniform;
    else bad(key, v);
  } else if (key == "trials") {
    trials = static_cast<int>(to_int(key, v));
  } else if (key == "base_seed") {
    base_seed = to_u64(key, v);
  } else if (key == "output_dir") {
    output_dir = std::string(v);
  } else if (key == "threads") {
    threads = static_cast<int>(to_int(key, v));
  } else if (key == "match") {
    if (v == "index") match = MatchStrategy::Index;
    else if (v == "value") match = MatchStrategy::Value;
    else bad(key, v);
  } else if (key == "erf_argument") {
    if (v == "sqrt_eps") erf_argument = ErfArgument::SqrtEpsilon;
    else if (v == "eps") erf_argument = ErfArgument::Epsilon;
    else bad(key, v);
  } else if (key == "scale") {
    if (v == "consistent") scale_convention = ScaleConvention::Consistent;
    else if (v == "literal") scale_convention = ScaleConvention::Literal;
    else bad(key, v);
  } else if (key == "n_theta") {
    n_theta = static_cast<Eigen::Index>(to_int(key, v));
  } else if (key == "grid") {
    grid = static_cast<Eigen::Index>(to_int(key, v));
  } else if (key == "grid_weight") {
    if (v == "plain") volume_weighted_grid = false;
    else if (v == "volume") volume_weighted_grid = true;
    else bad(key, v);
  } else if (key == "cluster_tol") {
    cluster_tol = to_double(key, v);
  } else if (key == "tol") {
    eigen.tol = to_double(key, v);
  } else if (key == "max_restarts") {
    eigen.max_restarts = static_cast<int>(to_int(key, v));
  } else if (key == "filter_degree") {
    eigen.filter_degree = static_cast<int>(to_int(key, v));
  } else if (key == "krylov_dim") {
    eigen.krylov_dim = static_cast<Eigen::Index>(to_int(key, v));
  } else {
    throw InvalidArgument("config: unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::validate() const {
  if (n.empty()) throw InvalidArgument("config: n is empty");
  for (auto v : n) {
    if (v < 4) throw InvalidArgument("config: every n must be at least 4");
    if (manifold == Manifold::SemiTorus && scheme == Scheme::Grid) {
      const auto s = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v))));
      if (s * s != v) throw InvalidArgument("config: semitorus grid needs perfect-square n");
    }
  }
  if (M < 1) throw InvalidArgument("config: M must be positive");
  if (trials < 1) throw InvalidArgument("config: trials must be positive");
  if (threads < 1) throw InvalidArgument("config: threads must be positive");
  if (bc == BoundaryCondition::Dirichlet && !has_boundary(manifold)) {
    throw InvalidArgument("config: bc = dirichlet needs a manifold with boundary");
  }
  if (bc == BoundaryCondition::Closed && manifold != Manifold::Circle) {
    throw InvalidArgument("config: bc = closed needs a closed manifold (circle)");
  }
  if (bc == BoundaryCondition::Neumann && manifold != Manifold::SemiCircle) {
    throw InvalidArgument("config: bc = neumann is only available on the semicircle");
  }
  if (manifold != Manifold::SemiCircle && density != Density::Uniform) {
    throw InvalidArgument("config: boundary_weighted density is only defined on the semicircle");
  }
  if (epsilon.mode == EpsilonRule::Mode::Fixed && !(epsilon.value > 0.0)) {
    throw InvalidArgument("config: fixed epsilon must be positive");
  }
  if (epsilon.mode == EpsilonRule::Mode::Table) {
    if (epsilon.table.size() != n.size()) throw InvalidArgument("config: epsilon table length must match the n list");
    for (double e : epsilon.table) {
      if (!(e > 0.0)) throw InvalidArgument("config: epsilon table values must be positive");
    }
  }
  if (epsilon.mode == EpsilonRule::Mode::Interp) {
    if (epsilon.points.size() < 2) throw InvalidArgument("config: interp needs at least two n=eps points");
    for (const auto& [pn, pe] : epsilon.points) {
      if (!(pn > 0.0) || !(pe > 0.0)) throw InvalidArgument("config: interp points must be positive");
    }
  }
  if (K.mode != CountRule::Mode::SqrtN && !(K.value > 0.0)) throw InvalidArgument("config: K must be positive");
  for (auto v : n) {
    if (resolve_neighbor_count(K, v) >= v) throw InvalidArgument("config: K must be smaller than n");
  }
  if (r.mode == RadiusRule::Mode::Fixed && !(r.value > 0.0)) throw InvalidArgument("config: r must be positive");
  if (n_theta < 32) throw InvalidArgument("config: n_theta must be at least 32");
  if (grid < 2) throw InvalidArgument("config: grid must be at least 2");
  if (!(eigen.tol > 0.0) || eigen.max_restarts < 1) throw InvalidArgument("config: bad eigensolver settings");
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["manifold"] = std::string(to_string(manifold));
  std::string ns;
  for (std::size_t i = 0; i < n.size(); ++i) ns += (i ? "," : "") + std::to_string(n[i]);
  kv["n"] = ns;
  kv["scheme"] = std::string(to_string(scheme));
  kv["density"] = std::string(to_string(density));
  kv["bc"] = std::string(to_string(bc));
  kv["M"] = std::to_string(M);
  switch (epsilon.mode) {
    case EpsilonRule::Mode::Auto: kv["epsilon"] = "auto"; break;
    case EpsilonRule::Mode::Fixed: kv["epsilon"] = "fixed:" + fmt(epsilon.value); break;
    case EpsilonRule::Mode::Table: kv["epsilon"] = "table:" + join_doubles(epsilon.table); break;
    case EpsilonRule::Mode::Interp: {
      std::string s = "interp:";
      for (std::size_t i = 0; i < epsilon.points.size(); ++i) {
        s += (i ? "," : "") + fmt(epsilon.points[i].first) + "=" + fmt(epsilon.points[i].second);
      }
      kv["epsilon"] = s;
      break;
    }
  }
  switch (K.mode) {
    case CountRule::Mode::SqrtN: kv["K"] = "sqrt_n"; break;
    case CountRule::Mode::Fixed: kv["K"] = "fixed:" + std::to_string(static_cast<long long>(K.value)); break;
    case CountRule::Mode::Scaled: kv["K"] = "scaled:" + fmt(K.value); break;
  }
  kv["r"] = r.mode == RadiusRule::Mode::SqrtEps ? "sqrt_eps" : "fixed:" + fmt(r.value);
  kv["normalization"] = normalization == Normalization::BoundaryCorrected ? "boundary_corrected" : "constant_m0";
  kv["operator"] = op == OperatorKind::SymmetricUniform ? "symmetric_uniform" : "density_corrected";
  kv["trials"] = std::to_string(trials);
  kv["base_seed"] = std::to_string(base_seed);
  kv["match"] = match == MatchStrategy::Index ? "index" : "value";
  kv["erf_argument"] = erf_argument == ErfArgument::SqrtEpsilon ? "sqrt_eps" : "eps";
  kv["scale"] = scale_convention == ScaleConvention::Consistent ? "consistent" : "literal";
  kv["n_theta"] = std::to_string(n_theta);
  kv["grid"] = std::to_string(grid);
  kv["grid_weight"] = volume_weighted_grid ? "volume" : "plain";
  kv["cluster_tol"] = fmt(cluster_tol);
  kv["tol"] = fmt(eigen.tol);
  kv["max_restarts"] = std::to_string(eigen.max_restarts);
  kv["filter_degree"] = std::to_string(eigen.filter_degree);
  kv["krylov_dim"] = std::to_string(eigen.krylov_dim);
  // output_dir and threads do not change results and are left out.
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Eigen::Index resolve_neighbor_count(const CountRule& rule, Eigen::Index n) {
  switch (rule.mode) {
    case CountRule::Mode::SqrtN: return default_neighbor_count(n);
    case CountRule::Mode::Fixed: return static_cast<Eigen::Index>(rule.value);
    case CountRule::Mode::Scaled:
      return std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::ceil(rule.value * std::sqrt(static_cast<double>(n)))));
  }
  return default_neighbor_count(n);
}

std::optional<double> resolve_epsilon(const EpsilonRule& rule, std::size_t index, Eigen::Index n) {
  switch (rule.mode) {
    case EpsilonRule::Mode::Auto: return std::nullopt;
    case EpsilonRule::Mode::Fixed: return rule.value;
    case EpsilonRule::Mode::Table:
      if (index >= rule.table.size()) throw InvalidArgument("epsilon table has no entry for this n");
      return rule.table[index];
    case EpsilonRule::Mode::Interp: {
      const auto& p = rule.points;
      const double x = std::log(static_cast<double>(n));
      std::size_t hi = 1;
      while (hi + 1 < p.size() && std::log(p[hi].first) < x) ++hi;
      const double x0 = std::log(p[hi - 1].first), x1 = std::log(p[hi].first);
      const double y0 = std::log(p[hi - 1].second), y1 = std::log(p[hi].second);
      return std::exp(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
    }
  }
  return std::nullopt;
}

SpectrumRun run_single(const ExperimentConfig& config, std::size_t n_index, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  config.validate();
  SpectrumRun run;
  run.n = config.n.at(n_index);
  run.seed = seed;

  auto t = clock::now();
  switch (config.manifold) {
    case Manifold::SemiCircle: run.cloud = sample_semicircle(run.n, config.scheme, config.density, seed); break;
    case Manifold::SemiTorus: run.cloud = sample_semitorus(run.n, config.scheme, seed); break;
    case Manifold::Circle: run.cloud = sample_circle(run.n, config.scheme, seed); break;
  }
  run.times.sample = seconds_since(t);

  t = clock::now();
  run.K = resolve_neighbor_count(config.K, run.n);
  KnnPattern pattern = build_knn_pattern(run.cloud.ambient, run.K);
  run.times.neighbors = seconds_since(t);

  t = clock::now();
  if (auto e = resolve_epsilon(config.epsilon, n_index, run.n)) {
    run.epsilon = *e;
  } else {
    const BandwidthTuning tuning = tune_bandwidth(pattern, default_bandwidth_grid());
    run.epsilon = tuning.epsilon;
    run.d_estimate = tuning.d_estimate;
  }
  run.times.tune = seconds_since(t);

  t = clock::now();
  const int dim = intrinsic_dimension(config.manifold);
  const MomentConstants moments = moment_constants(dim);
  SparseAffinity A = build_affinity(std::move(pattern), run.epsilon, dim);
  LaplacianOperator L;
  if (config.op == OperatorKind::SymmetricUniform) {
    L = assemble_symmetric_uniform(A, moments, config.scale_convention);
  } else {
    const DensityEstimate q = estimate_density(A, run.cloud.boundary_distance, config.normalization, config.erf_argument);
    L = assemble_density_corrected(A, q, moments, config.scale_convention);
  }
  const bool needs_extension = config.manifold == Manifold::SemiTorus;
  if (!needs_extension) A = SparseAffinity{};
  if (config.bc == BoundaryCondition::Dirichlet) {
    run.r = config.r.mode == RadiusRule::Mode::SqrtEps ? std::sqrt(run.epsilon) : config.r.value;
    L = truncate_dirichlet(L, run.cloud.boundary_distance, *run.r);
    run.untouched_by_truncation = L.untouched_by_truncation;
  }
  run.n1 = L.size();
  run.n0 = run.n - run.n1;
  if (run.n1 + run.n0 != run.n) throw std::logic_error("truncation lost points");
  if (config.M > run.n1) throw InvalidArgument("config: M exceeds the number of retained points");
  run.times.assemble = seconds_since(t);

  t = clock::now();
  EigenOptions eo = config.eigen;
  eo.seed = config.eigen.seed ^ seed;
  run.spectrum = smallest_eigenpairs(L, config.M, eo);
  run.max_residual = run.spectrum.residuals.size() ? run.spectrum.residuals.maxCoeff() : 0.0;
  run.times.solve = seconds_since(t);

  t = clock::now();
  if (config.manifold == Manifold::SemiTorus) {
    run.reference = semitorus_spectrum(config.M, config.n_theta);
  } else {
    run.reference = semicircle_spectrum(config.bc, config.M);
  }
  run.times.reference = seconds_since(t);

  t = clock::now();
  if (needs_extension) {
    const PointMatrix grid = semitorus_comparison_grid(config.grid);
    const PointMatrix queries = embed_semitorus(grid);
    ExtensionContext ctx(run.cloud.ambient, std::move(A), L, run.spectrum);
    std::vector<Eigen::Index> modes(static_cast<std::size_t>(config.M));
    for (Eigen::Index k = 0; k < config.M; ++k) modes[static_cast<std::size_t>(k)] = k;
    const Eigen::MatrixXd u_grid = ctx.extend_batch(modes, queries);
    const Eigen::MatrixXd f_grid = run.reference.evaluate(grid, config.M);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(grid.rows());
    if (config.volume_weighted_grid) {
      for (Eigen::Index i = 0; i < grid.rows(); ++i) w[i] = 2.0 + std::cos(grid(i, 0));
    }
    run.errors = error_report(run.spectrum.eigenvalues, u_grid, run.reference.eigenvalues, run.reference.angular_mode,
                              f_grid, w, config.M, config.match, config.cluster_tol);
  } else {
    PointMatrix kept(run.n1, run.cloud.intrinsic_dim());
    for (Eigen::Index a = 0; a < run.n1; ++a) kept.row(a) = run.cloud.intrinsic.row(L.kept_indices[static_cast<std::size_t>(a)]);
    const Eigen::MatrixXd f = run.reference.evaluate(kept, config.M);
    run.errors = error_report(run.spectrum.eigenvalues, run.spectrum.eigenvectors, run.reference.eigenvalues,
                              run.reference.angular_mode, f, run.spectrum.measure_weights, config.M, config.match,
                              config.cluster_tol);
  }
  run.times.compare = seconds_since(t);
  return run;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  std::stringstream ss(c.canonical());
  std::string line;
  while (std::getline(ss, line)) {
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

nlohmann::json times_json(const StageTimes& t) {
  return {{"sample", t.sample},   {"neighbors", t.neighbors}, {"tune", t.tune},       {"assemble", t.assemble},
          {"solve", t.solve},     {"reference", t.reference}, {"compare", t.compare}, {"total", t.total()}};
}

}  // namespace

SpectrumRun run_spectrum(const ExperimentConfig& config) {
  SpectrumRun run = run_single(config, 0, config.base_seed);
  if (config.output_dir.empty()) return run;

  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  io::write_cloud(dir / "cloud.csv", run.cloud);
  io::write_spectrum(dir / "spectrum.csv", run.spectrum);
  io::write_vectors(dir / "vectors.csv", run.spectrum.eigenvectors);
  io::write_error_report(dir / "errors.csv", run.errors);
  io::write_reference(dir / "reference.csv", run.reference);
  {
    std::ofstream kept(dir / "kept_indices.csv");
    kept << "local,parent\n";
    for (std::size_t a = 0; a < run.spectrum.kept_indices.size(); ++a) kept << a << ',' << run.spectrum.kept_indices[a] << '\n';
  }
  std::ofstream(dir / "config.txt") << config.canonical();

  nlohmann::json per_mode = nlohmann::json::array();
  for (const auto& e : run.errors.per_mode) {
    per_mode.push_back({{"mode", e.mode},
                        {"ref_mode", e.ref_mode},
                        {"m_ref", e.m_ref},
                        {"lambda_est", e.lambda_est},
                        {"lambda_ref", e.lambda_ref},
                        {"rel_err", e.rel_err},
                        {"absolute", e.absolute},
                        {"vec_mse", e.vec_mse}});
  }
  nlohmann::json report = {
      {"config", config_json(config)},
      {"config_hash", config.hash()},
      {"resolved",
       {{"n", run.n},
        {"seed", run.seed},
        {"K", run.K},
        {"epsilon", run.epsilon},
        {"d_estimate", run.d_estimate ? nlohmann::json(*run.d_estimate) : nlohmann::json(nullptr)},
        {"r", run.r ? nlohmann::json(*run.r) : nlohmann::json(nullptr)},
        {"n1", run.n1},
        {"n0", run.n0},
        {"no_boundary_effect", run.untouched_by_truncation}}},
      {"solver",
       {{"max_residual", run.max_residual},
        {"restarts", run.spectrum.restarts},
        {"matvecs", run.spectrum.matvecs},
        {"filter_degree", run.spectrum.filter_degree}}},
      {"errors",
       {{"mean_rel_eig_err", run.errors.mean_rel_eig_err}, {"mean_vec_mse", run.errors.mean_vec_mse}, {"per_mode", per_mode}}},
      {"wall_clock_seconds", times_json(run.times)}};
  std::ofstream(dir / "report.json") << report.dump(2) << '\n';
  return run;
}

ConvergenceRun run_convergence(const ExperimentConfig& config) {
  config.validate();
  struct Job {
    std::size_t n_index;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < config.n.size(); ++i) {
    for (int t = 0; t < config.trials; ++t) jobs.push_back({i, t});
  }
  struct Result {
    ConvergenceRow row;
    Eigen::Index n1 = 0;
    double max_residual = 0.0;
    StageTimes times;
    std::exception_ptr error;
  };
  std::vector<Result> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job job = jobs[j];
      const Eigen::Index n = config.n[job.n_index];
      const std::uint64_t seed = derive_trial_seed(config.base_seed, static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(job.trial));
      try {
        const SpectrumRun run = run_single(config, job.n_index, seed);
        results[j].row = {n, seed, run.epsilon, run.errors.mean_rel_eig_err, run.errors.mean_vec_mse};
        results[j].n1 = run.n1;
        results[j].max_residual = run.max_residual;
        results[j].times = run.times;
      } catch (...) {
        results[j].error = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(config.threads, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
  }

  // Jobs were enumerated in (n list order, trial) order; report sorted by n.
  std::vector<std::size_t> order(jobs.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return results[a].row.n < results[b].row.n || (results[a].row.n == results[b].row.n && jobs[a].trial < jobs[b].trial);
  });
  ConvergenceRun out;
  for (std::size_t j : order) {
    out.rows.push_back(results[j].row);
    out.trial_index.push_back(jobs[j].trial);
    out.n1.push_back(results[j].n1);
    out.max_residual.push_back(results[j].max_residual);
    out.times.push_back(results[j].times);
  }
  std::vector<Eigen::Index> distinct(config.n.begin(), config.n.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() >= 3) {
    out.fit = fit_rate(out.rows);
    out.fitted = true;
  } else {
    out.fit = aggregate_rows(out.rows);
  }

  if (config.output_dir.empty()) return out;
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "convergence.csv");
    f << "n,trial,trial_seed,epsilon,n1,mean_rel_eig_err,mean_vec_mse\n";
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      const auto& r = out.rows[i];
      f << r.n << ',' << out.trial_index[i] << ',' << r.trial_seed << ',' << fmt(r.epsilon) << ',' << out.n1[i] << ','
        << fmt(r.mean_rel_eig_err) << ',' << fmt(r.mean_vec_mse) << '\n';
    }
  }
  {
    std::ofstream f(dir / "convergence_by_n.csv");
    f << "n,trials,eig_mean,eig_median,eig_std,vec_mean,vec_median,vec_std\n";
    for (std::size_t i = 0; i < out.fit.n_values.size(); ++i) {
      f << out.fit.n_values[i] << ',' << config.trials << ',' << fmt(out.fit.eig_mean[i]) << ','
        << fmt(out.fit.eig_median[i]) << ',' << fmt(out.fit.eig_std[i]) << ',' << fmt(out.fit.vec_mean[i]) << ','
        << fmt(out.fit.vec_median[i]) << ',' << fmt(out.fit.vec_std[i]) << '\n';
    }
  }
  std::ofstream(dir / "config.txt") << config.canonical();

  nlohmann::json runs = nlohmann::json::array();
  double residual_max = 0.0;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    residual_max = std::max(residual_max, out.max_residual[i]);
    runs.push_back({{"n", out.rows[i].n},
                    {"trial", out.trial_index[i]},
                    {"seed", out.rows[i].trial_seed},
                    {"epsilon", out.rows[i].epsilon},
                    {"n1", out.n1[i]},
                    {"n0", out.rows[i].n - out.n1[i]},
                    {"max_residual", out.max_residual[i]},
                    {"wall_clock_seconds", times_json(out.times[i])}});
  }
  nlohmann::json slopes = nullptr;
  if (out.fitted) {
    slopes = {{"eig", out.fit.eig.slope},
              {"vec", out.fit.vec.slope},
              {"eig_residual", out.fit.eig.residual},
              {"vec_residual", out.fit.vec.residual}};
  }
  nlohmann::json report = {{"config", config_json(config)},
                           {"config_hash", config.hash()},
                           {"slopes", slopes},
                           {"max_residual", residual_max},
                           {"runs", runs}};
  std::ofstream(dir / "report.json") << report.dump(2) << '\n';
  return out;
}

}  // namespace tgl
