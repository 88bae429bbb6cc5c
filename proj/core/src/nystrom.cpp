#include "tgl/nystrom.hpp"

#include <algorithm>
#include <cmath>

#include "tgl/error.hpp"

namespace tgl {

ExtensionContext::ExtensionContext(PointMatrix train_points, SparseAffinity affinity, const LaplacianOperator& op,
                                   const Spectrum& spectrum, double sigma_floor)
    : points_(std::move(train_points)),
      affinity_(std::move(affinity)),
      cw_(op.column_weights),
      rn_(op.row_normalizers),
      sigma_(spectrum.sigma),
      vectors_(spectrum.eigenvectors),
      sigma_floor_(sigma_floor) {
  const Eigen::Index n = points_.rows();
  if (affinity_.n != n || op.parent_size != n || cw_.size() != n || rn_.size() != n) {
    throw InvalidArgument("ExtensionContext: training data, affinity and operator disagree in size");
  }
  if (vectors_.rows() != static_cast<Eigen::Index>(op.kept_indices.size())) {
    throw InvalidArgument("ExtensionContext: spectrum does not belong to the operator");
  }
  local_ = Eigen::VectorXi::Constant(n, -1);
  for (std::size_t a = 0; a < op.kept_indices.size(); ++a) local_[op.kept_indices[a]] = static_cast<int>(a);
  for (double r : affinity_.knn_radius_sq) max_radius_sq_ = std::max(max_radius_sq_, r);
  search_ = std::make_unique<NeighborSearch>(points_);
}

bool ExtensionContext::extendable(Eigen::Index mode) const {
  return mode >= 0 && mode < sigma_.size() && sigma_[mode] > sigma_floor_;
}

void ExtensionContext::check_mode(Eigen::Index mode) const {
  if (mode < 0 || mode >= sigma_.size()) throw InvalidArgument("extend: mode index out of range");
  if (!extendable(mode)) throw NonExtendableMode("extend: kernel eigenvalue is below the floor");
}

ExtensionContext::Row ExtensionContext::kernel_row(const double* query) const {
  const Eigen::Index n = points_.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  Row row;

  const auto nearest = search_->knn(query, 1);
  if (!nearest.empty() && nearest.front().dist_sq == 0.0) {
    // Coincides with a training point: reuse its stored row and degree.
    const Eigen::Index l = nearest.front().index;
    const double hl = 0.5 / rn_[l];
    for (SparseMatrix::InnerIterator it(affinity_.entries, l); it; ++it) {
      const int a = local_[it.col()];
      if (a < 0) continue;
      row.index.push_back(a);
      row.weight.push_back(it.value() * cw_[it.col()] * (hl + 0.5 / rn_[it.col()]) * inv_n);
    }
    return row;
  }

  std::vector<Neighbor> nbrs = search_->knn(query, affinity_.K);
  for (const auto& nb : search_->within(query, max_radius_sq_)) {
    if (nb.dist_sq <= affinity_.knn_radius_sq[static_cast<std::size_t>(nb.index)]) nbrs.push_back(nb);
  }
  std::sort(nbrs.begin(), nbrs.end(), [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  nbrs.erase(std::unique(nbrs.begin(), nbrs.end(),
                         [](const Neighbor& a, const Neighbor& b) { return a.index == b.index; }),
             nbrs.end());

  std::vector<double> k(nbrs.size());
  double rn = 0.0;
  for (std::size_t t = 0; t < nbrs.size(); ++t) {
    k[t] = std::exp(-nbrs[t].dist_sq / affinity_.epsilon);
    rn += k[t] * cw_[nbrs[t].index];
  }
  rn *= inv_n;
  if (!(rn > 0.0)) return row;  // underflow far from the data: the extension is 0
  const double hx = 0.5 / rn;
  for (std::size_t t = 0; t < nbrs.size(); ++t) {
    const Eigen::Index j = nbrs[t].index;
    const int a = local_[j];
    if (a < 0) continue;
    row.index.push_back(a);
    row.weight.push_back(k[t] * cw_[j] * (hx + 0.5 / rn_[j]) * inv_n);
  }
  return row;
}

double ExtensionContext::extend(Eigen::Index mode, const Eigen::Ref<const Eigen::VectorXd>& query) const {
  check_mode(mode);
  if (query.size() != points_.cols()) throw InvalidArgument("extend: query dimension mismatch");
  const Eigen::VectorXd q = query;
  const Row row = kernel_row(q.data());
  double acc = 0.0;
  for (std::size_t t = 0; t < row.index.size(); ++t) acc += row.weight[t] * vectors_(row.index[t], mode);
  return acc / sigma_[mode];
}

Eigen::MatrixXd ExtensionContext::extend_batch(const std::vector<Eigen::Index>& modes, const PointMatrix& queries) const {
  for (Eigen::Index m : modes) check_mode(m);
  if (queries.rows() > 0 && queries.cols() != points_.cols()) throw InvalidArgument("extend_batch: query dimension mismatch");
  Eigen::MatrixXd out(queries.rows(), static_cast<Eigen::Index>(modes.size()));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    const Row row = kernel_row(queries.row(q).data());
    for (std::size_t c = 0; c < modes.size(); ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < row.index.size(); ++t) acc += row.weight[t] * vectors_(row.index[t], modes[c]);
      out(q, static_cast<Eigen::Index>(c)) = acc / sigma_[modes[c]];
    }
  }
  return out;
}

}  // namespace tgl
