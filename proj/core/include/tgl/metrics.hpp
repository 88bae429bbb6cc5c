#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace tgl {

enum class MatchStrategy { Index, Value };

/// Pairs estimated mode i with reference mode pairing[i].
///
/// Index matching is the identity; value matching greedily assigns each
/// estimate, in ascending order, to the nearest unused reference value.
std::vector<Eigen::Index> match_eigenpairs(const Eigen::VectorXd& est, const std::vector<double>& ref, Eigen::Index M,
                                           MatchStrategy strategy = MatchStrategy::Index);

/// Groups of reference modes whose eigenvalues agree within
/// cluster_rel_tol * max(|lambda|, 1). Each group lists its mode indices.
std::vector<std::vector<Eigen::Index>> reference_clusters(const std::vector<double>& ref, Eigen::Index M,
                                                          double cluster_rel_tol = 1e-6);

/// Squared distance, in (1/n) sum w_i x_i^2, between u and the closest unit
/// vector in span(V). With one column this is the sign-aligned MSE.
/// Both u and the columns of V are expected to be unit in that norm.
double align_and_mse(const Eigen::VectorXd& u, const Eigen::MatrixXd& V, const Eigen::VectorXd& weights);

struct ModeError {
  Eigen::Index mode;
  Eigen::Index ref_mode;
  int m_ref;
  double lambda_est;
  double lambda_ref;
  double rel_err;  // absolute error when lambda_ref == 0
  double vec_mse;
  bool absolute;
};

struct ErrorReport {
  std::vector<ModeError> per_mode;
  double mean_rel_eig_err = 0.0;
  double mean_vec_mse = 0.0;
  Eigen::Index M = 0;
  std::vector<Eigen::Index> matched;
};

/// Compares estimated values/vectors with reference values/vectors sampled
/// on the same point set. Both vector sets are renormalized to unit
/// (1/n) sum w x^2 before comparison. Modes whose reference value is 0 report
/// an absolute error and are left out of the mean eigenvalue error.
ErrorReport error_report(const Eigen::VectorXd& lambda_est, const Eigen::MatrixXd& u_est,
                         const std::vector<double>& lambda_ref, const std::vector<int>& m_ref,
                         const Eigen::MatrixXd& f_ref, const Eigen::VectorXd& weights, Eigen::Index M,
                         MatchStrategy strategy = MatchStrategy::Index, double cluster_rel_tol = 1e-6);

struct ConvergenceRow {
  Eigen::Index n;
  std::uint64_t trial_seed;
  double epsilon;
  double mean_rel_eig_err;
  double mean_vec_mse;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
};

struct ConvergenceFit {
  RateFit eig;
  RateFit vec;
  std::vector<Eigen::Index> n_values;
  std::vector<double> eig_mean, eig_median, eig_std;
  std::vector<double> vec_mean, vec_median, vec_std;
};

/// Least-squares slope of log(y) on log(x). Needs >= 3 distinct x and y > 0.
RateFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Per-n trial statistics (mean, median, sample std) plus power-law fits of
/// the per-n means.
ConvergenceFit fit_rate(const std::vector<ConvergenceRow>& rows);

/// Per-n statistics only; usable with fewer than three sizes.
ConvergenceFit aggregate_rows(const std::vector<ConvergenceRow>& rows);

}  // namespace tgl
