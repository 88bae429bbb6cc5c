#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "tgl/eigensolver.hpp"
#include "tgl/kd_tree.hpp"
#include "tgl/kernel.hpp"
#include "tgl/laplacian.hpp"

namespace tgl {

inline constexpr double kSigmaFloor = 1e-8;

/// Everything needed to evaluate the normalized kernel row of a new point
/// against the training cloud, frozen at assembly time.
///
/// The row of a query x is A(x, x_j) * cw_j * (1/(2 rn(x)) + 1/(2 rn_j)) / n
/// over x's neighbors j, with rn(x) = (1/n) sum_k A(x, x_k) cw_k. The
/// neighbors of x are its K nearest training points together with every
/// training point whose own K-th neighbor distance reaches x; a query equal
/// to a training point reuses that point's stored row.
class ExtensionContext {
 public:
  ExtensionContext(PointMatrix train_points, SparseAffinity affinity, const LaplacianOperator& op,
                   const Spectrum& spectrum, double sigma_floor = kSigmaFloor);

  Eigen::Index modes() const noexcept { return sigma_.size(); }
  bool extendable(Eigen::Index mode) const;
  const Eigen::VectorXd& sigma() const noexcept { return sigma_; }

  /// Value of eigenvector `mode` at `query` (ambient coordinates).
  double extend(Eigen::Index mode, const Eigen::Ref<const Eigen::VectorXd>& query) const;

  /// Rows are queries, columns follow `modes`.
  Eigen::MatrixXd extend_batch(const std::vector<Eigen::Index>& modes, const PointMatrix& queries) const;

 private:
  struct Row {
    std::vector<Eigen::Index> index;  // kept-local indices
    std::vector<double> weight;       // normalized kernel / n
  };
  Row kernel_row(const double* query) const;
  void check_mode(Eigen::Index mode) const;

  PointMatrix points_;
  SparseAffinity affinity_;
  std::unique_ptr<NeighborSearch> search_;
  Eigen::VectorXd cw_, rn_;
  Eigen::VectorXi local_;  // parent index -> kept index, or -1
  Eigen::VectorXd sigma_;
  Eigen::MatrixXd vectors_;
  double max_radius_sq_ = 0.0;
  double sigma_floor_;
};

}  // namespace tgl
