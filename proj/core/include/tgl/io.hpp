#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tgl/eigensolver.hpp"
#include "tgl/kernel.hpp"
#include "tgl/laplacian.hpp"
#include "tgl/metrics.hpp"
#include "tgl/reference.hpp"
#include "tgl/sampler.hpp"

namespace tgl::io {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// idx,intrinsic_0[,intrinsic_1],x,y[,z],boundary_distance
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_cloud(const std::filesystem::path& path, Manifold manifold);

/// Triplets i,j,value plus a JSON sidecar {n, epsilon, K, dim}.
void write_affinity(const std::filesystem::path& csv, const std::filesystem::path& sidecar, const SparseAffinity& A);

/// Triplets of the assembled Laplacian plus a JSON sidecar and kept-index list.
void write_operator(const std::filesystem::path& csv, const std::filesystem::path& sidecar,
                    const std::filesystem::path& kept, const LaplacianOperator& L);

/// mode,eigenvalue,sigma,residual
void write_spectrum(const std::filesystem::path& path, const Spectrum& s);
/// One column per mode, one row per (kept) point.
void write_vectors(const std::filesystem::path& path, const Eigen::MatrixXd& vectors);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

struct SpectrumTable {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd sigma;
  Eigen::VectorXd residuals;
};
SpectrumTable read_spectrum(const std::filesystem::path& path);

/// mode,m,eigenvalue
void write_reference(const std::filesystem::path& path, const ReferenceSpectrum& r);
/// s x s row-major table of one reference mode on the comparison grid, theta fastest.
void write_reference_grid(const std::filesystem::path& path, const ReferenceSpectrum& r, Eigen::Index mode,
                          Eigen::Index s = 64);

/// query_idx,mode,value
void write_extension(const std::filesystem::path& path, const std::vector<Eigen::Index>& modes,
                     const Eigen::MatrixXd& values);

/// mode,m_ref,lambda_est,lambda_ref,rel_err,vec_mse
void write_error_report(const std::filesystem::path& path, const ErrorReport& r);

/// Plain numeric table with a header line.
PointMatrix read_points(const std::filesystem::path& path);

}  // namespace tgl::io
