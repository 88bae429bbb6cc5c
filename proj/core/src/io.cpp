#include "tgl/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tgl/error.hpp"

namespace tgl::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

std::vector<std::vector<double>> read_table(const std::filesystem::path& path, std::vector<std::string>* header) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read " + path.string());
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    if (first) {
      first = false;
      if (header) *header = fields;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : fields) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc()) throw InvalidArgument("bad number '" + c + "' in " + path.string());
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  auto f = open_out(path);
  const Eigen::Index di = cloud.intrinsic_dim(), da = cloud.ambient_dim();
  static const char* axes[] = {"x", "y", "z"};
  f << "idx";
  for (Eigen::Index k = 0; k < di; ++k) f << ",intrinsic_" << k;
  for (Eigen::Index k = 0; k < da; ++k) f << ',' << axes[k];
  f << ",boundary_distance\n";
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    f << i;
    for (Eigen::Index k = 0; k < di; ++k) f << ',' << format_double(cloud.intrinsic(i, k));
    for (Eigen::Index k = 0; k < da; ++k) f << ',' << format_double(cloud.ambient(i, k));
    f << ',' << format_double(cloud.boundary_distance[static_cast<std::size_t>(i)]) << '\n';
  }
}

PointCloud read_cloud(const std::filesystem::path& path, Manifold manifold) {
  std::vector<std::string> header;
  const auto rows = read_table(path, &header);
  const Eigen::Index di = intrinsic_dimension(manifold);
  const Eigen::Index da = manifold == Manifold::SemiTorus ? 3 : 2;
  if (static_cast<Eigen::Index>(header.size()) != 2 + di + da) {
    throw InvalidArgument("cloud file " + path.string() + " does not match the manifold");
  }
  PointCloud c;
  c.manifold = manifold;
  const auto n = static_cast<Eigen::Index>(rows.size());
  c.intrinsic.resize(n, di);
  c.ambient.resize(n, da);
  c.boundary_distance.resize(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < di; ++k) c.intrinsic(i, k) = r[static_cast<std::size_t>(1 + k)];
    for (Eigen::Index k = 0; k < da; ++k) c.ambient(i, k) = r[static_cast<std::size_t>(1 + di + k)];
    c.boundary_distance[static_cast<std::size_t>(i)] = r.back();
  }
  return c;
}

void write_affinity(const std::filesystem::path& csv, const std::filesystem::path& sidecar, const SparseAffinity& A) {
  auto f = open_out(csv);
  f << "i,j,value\n";
  for (Eigen::Index i = 0; i < A.entries.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(A.entries, i); it; ++it) {
      f << i << ',' << it.col() << ',' << format_double(it.value()) << '\n';
    }
  }
  nlohmann::json j = {{"n", A.n}, {"epsilon", A.epsilon}, {"K", A.K}, {"dim", A.dim}};
  open_out(sidecar) << j.dump(2) << '\n';
}

namespace {
const char* kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::SymmetricUniform: return "symmetric_uniform";
    case OperatorKind::DensityCorrected: return "density_corrected";
    case OperatorKind::TruncatedDirichlet: return "truncated_dirichlet";
  }
  return "unknown";
}
}  // namespace

void write_operator(const std::filesystem::path& csv, const std::filesystem::path& sidecar,
                    const std::filesystem::path& kept, const LaplacianOperator& L) {
  const SparseMatrix M = L.matrix();
  auto f = open_out(csv);
  f << "i,j,value\n";
  for (Eigen::Index i = 0; i < M.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(M, i); it; ++it) {
      f << i << ',' << it.col() << ',' << format_double(it.value()) << '\n';
    }
  }
  auto k = open_out(kept);
  k << "local,parent\n";
  for (std::size_t a = 0; a < L.kept_indices.size(); ++a) k << a << ',' << L.kept_indices[a] << '\n';
  nlohmann::json j = {{"kind", kind_name(L.kind)},
                      {"base_kind", kind_name(L.base_kind)},
                      {"epsilon", L.epsilon},
                      {"m2", L.m2},
                      {"dim", L.dim},
                      {"scale", L.scale},
                      {"n", L.parent_size},
                      {"n1", L.size()},
                      {"kept_indices", kept.filename().string()}};
  open_out(sidecar) << j.dump(2) << '\n';
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& s) {
  auto f = open_out(path);
  f << "mode,eigenvalue,sigma,residual\n";
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    f << k << ',' << format_double(s.eigenvalues[k]) << ',' << format_double(s.sigma[k]) << ','
      << format_double(s.residuals[k]) << '\n';
  }
}

void write_vectors(const std::filesystem::path& path, const Eigen::MatrixXd& vectors) {
  auto f = open_out(path);
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) f << (k ? "," : "") << "mode_" << k;
  f << '\n';
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) f << (k ? "," : "") << format_double(vectors(i, k));
    f << '\n';
  }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const auto rows = read_table(path, nullptr);
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw InvalidArgument("ragged table in " + path.string());
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return m;
}

PointMatrix read_points(const std::filesystem::path& path) { return read_matrix(path); }

SpectrumTable read_spectrum(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() != 4) throw InvalidArgument("spectrum file " + path.string() + " has the wrong columns");
  return {m.col(1), m.col(2), m.col(3)};
}

void write_reference(const std::filesystem::path& path, const ReferenceSpectrum& r) {
  auto f = open_out(path);
  f << "mode,m,eigenvalue\n";
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    f << k << ',' << r.angular_mode[static_cast<std::size_t>(k)] << ','
      << format_double(r.eigenvalues[static_cast<std::size_t>(k)]) << '\n';
  }
}

void write_reference_grid(const std::filesystem::path& path, const ReferenceSpectrum& r, Eigen::Index mode,
                          Eigen::Index s) {
  const PointMatrix grid = semitorus_comparison_grid(s);
  auto f = open_out(path);
  for (Eigen::Index i = 0; i < s; ++i) f << (i ? "," : "") << "theta_" << i;
  f << '\n';
  for (Eigen::Index j = 0; j < s; ++j) {
    for (Eigen::Index i = 0; i < s; ++i) f << (i ? "," : "") << format_double(r.evaluate(mode, grid.row(j * s + i).data()));
    f << '\n';
  }
}

void write_extension(const std::filesystem::path& path, const std::vector<Eigen::Index>& modes,
                     const Eigen::MatrixXd& values) {
  auto f = open_out(path);
  f << "query_idx,mode,value\n";
  for (Eigen::Index q = 0; q < values.rows(); ++q) {
    for (std::size_t c = 0; c < modes.size(); ++c) {
      f << q << ',' << modes[c] << ',' << format_double(values(q, static_cast<Eigen::Index>(c))) << '\n';
    }
  }
}

void write_error_report(const std::filesystem::path& path, const ErrorReport& r) {
  auto f = open_out(path);
  f << "mode,m_ref,lambda_est,lambda_ref,rel_err,vec_mse\n";
  for (const auto& e : r.per_mode) {
    f << e.mode << ',' << e.m_ref << ',' << format_double(e.lambda_est) << ',' << format_double(e.lambda_ref) << ','
      << format_double(e.rel_err) << ',' << format_double(e.vec_mse) << '\n';
  }
}

}  // namespace tgl::io
