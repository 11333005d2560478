#include "scheds/model.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace scheds {

GroupPartition GroupPartition::singletons(int p) {
  GroupPartition partition;
  partition.groups.reserve(p);
  for (int j = 0; j < p; ++j) partition.groups.push_back({j});
  return partition;
}

std::vector<std::string> GroupPartition::validate(int p) const {
  std::vector<std::string> violations;
  std::vector<int> seen(p, -1);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].empty()) {
      violations.push_back("partition group " + std::to_string(k) + " is empty");
      continue;
    }
    for (int j : groups[k]) {
      if (j < 0 || j >= p) {
        violations.push_back("partition index " + std::to_string(j) +
                             " in group " + std::to_string(k) +
                             " outside [0," + std::to_string(p) + ")");
      } else if (seen[j] >= 0) {
        violations.push_back("partition index " + std::to_string(j) +
                             " appears in groups " + std::to_string(seen[j]) +
                             " and " + std::to_string(k));
      } else {
        seen[j] = static_cast<int>(k);
      }
    }
  }
  for (int j = 0; j < p; ++j) {
    if (seen[j] < 0)
      violations.push_back("partition incomplete: index " + std::to_string(j) +
                           " not covered");
  }
  return violations;
}

std::vector<std::string> validate(const RegressionData& data) {
  std::vector<std::string> violations;
  const auto T = data.X.rows();
  if (data.X.cols() < 1) violations.push_back("p must be >= 1");
  if (data.R.cols() < 1) violations.push_back("q must be >= 1");
  if (T < 1) violations.push_back("T must be >= 1");
  if (data.Y.size() != T)
    violations.push_back("Y has " + std::to_string(data.Y.size()) +
                         " rows, X has " + std::to_string(T));
  if (data.R.rows() != T)
    violations.push_back("R has " + std::to_string(data.R.rows()) +
                         " rows, X has " + std::to_string(T));
  for (Eigen::Index t = 0; t < data.R.rows(); ++t)
    for (Eigen::Index l = 0; l < data.R.cols(); ++l)
      if (data.R(t, l) < 0.0)
        violations.push_back("R non-negativity at (" + std::to_string(t) +
                             "," + std::to_string(l) + ")");
  auto part = data.partition.validate(static_cast<int>(data.X.cols()));
  violations.insert(violations.end(), part.begin(), part.end());
  return violations;
}

int GroupGeometry::total_rank() const {
  int r = 0;
  for (const auto& b : blocks) r += b.rank;
  return r;
}

GroupGeometry group_geometry(const Matrix& X, const GroupPartition& partition) {
  const int p = static_cast<int>(X.cols());
  auto violations = partition.validate(p);
  if (!violations.empty())
    throw std::invalid_argument("group_geometry: " + violations.front());

  GroupGeometry geometry;
  geometry.blocks.resize(partition.groups.size());
  for (std::size_t k = 0; k < partition.groups.size(); ++k) {
    const auto& g = partition.groups[k];
    Matrix Xg(X.rows(), g.size());
    for (std::size_t j = 0; j < g.size(); ++j) Xg.col(j) = X.col(g[j]);

    Eigen::JacobiSVD<Matrix> svd(Xg, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cutoff && sv(i) > 0.0) ++rank;

    auto& block = geometry.blocks[k];
    block.rank = rank;
    block.Q = svd.matrixU().leftCols(rank);
    block.F = sv.head(rank).asDiagonal() *
              svd.matrixV().leftCols(rank).transpose();
  }
  return geometry;
}

Matrix group_projector(const GroupGeometry& geometry, int k) {
  const auto& block = geometry.blocks.at(k);
  if (block.rank == 0) {
    const auto T = block.Q.rows();
    return Matrix::Zero(T, T);
  }
  return block.Q * block.Q.transpose();
}

ColumnScaling ColumnScaling::identity(int p) {
  return ColumnScaling{Vector::Ones(p)};
}

ColumnScaling ColumnScaling::unit_norm(const Matrix& X) {
  Vector s = X.colwise().norm();
  for (Eigen::Index j = 0; j < s.size(); ++j)
    if (s(j) <= 0.0) s(j) = 1.0;
  return ColumnScaling{std::move(s)};
}

Matrix ColumnScaling::apply(const Matrix& X) const {
  if (X.cols() != scale.size())
    throw std::invalid_argument("ColumnScaling: column count mismatch");
  return X * scale.cwiseInverse().asDiagonal();
}

Vector ColumnScaling::to_raw(const Vector& coef_scaled) const {
  if (coef_scaled.size() != scale.size())
    throw std::invalid_argument("ColumnScaling: coefficient size mismatch");
  return coef_scaled.cwiseQuotient(scale);
}

}  // namespace scheds
