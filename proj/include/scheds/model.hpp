#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace scheds {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Disjoint, exhaustive partition of the column indices {0,...,p-1}.
struct GroupPartition {
  std::vector<std::vector<int>> groups;

  int group_count() const { return static_cast<int>(groups.size()); }

  /// One singleton group per column.
  static GroupPartition singletons(int p);

  /// Empty iff the groups are non-empty, pairwise disjoint and cover [0, p).
  std::vector<std::string> validate(int p) const;
};

/// Immutable problem input: design X (T x p), responses Y (T), variance
/// dictionary R (T x q, entries >= 0) and the group partition of [p].
struct RegressionData {
  Matrix X;
  Vector Y;
  Matrix R;
  GroupPartition partition;

  Eigen::Index rows() const { return X.rows(); }
};

/// Empty iff all RegressionData invariants hold; each entry names the
/// violated invariant and the offending index.
std::vector<std::string> validate(const RegressionData& data);

/// Per-group orthogonal geometry: rank r_k and a thin orthonormal basis Q_k
/// of range(X_{:,G_k}).  X_{:,G_k} = Q_k * F_k, so both the projector norm
/// |Pi_k z| = |Q_k^T z| and the penalty norm |X_{:,G_k} phi| = |F_k phi| use
/// r_k-dimensional vectors rather than T-dimensional ones.
struct GroupGeometry {
  struct Block {
    int rank = 0;
    Matrix Q;  // T x rank, orthonormal columns
    Matrix F;  // rank x |G_k|, with X_{:,G_k} = Q * F
  };
  std::vector<Block> blocks;

  int group_count() const { return static_cast<int>(blocks.size()); }
  int total_rank() const;
};

/// Rank is decided by singular values above 1e-10 * sigma_max per group.
GroupGeometry group_geometry(const Matrix& X, const GroupPartition& partition);

/// Dense T x T projector Q_k Q_k^T for group k (diagnostic use only).
Matrix group_projector(const GroupGeometry& geometry, int k);

/// Opt-in column normalization record.  apply() rescales columns to unit
/// Euclidean norm (zero columns are left alone); coefficients fitted on the
/// scaled design map back to the raw scale as phi_raw = phi_scaled / scale.
struct ColumnScaling {
  Vector scale;

  static ColumnScaling identity(int p);
  static ColumnScaling unit_norm(const Matrix& X);
  Matrix apply(const Matrix& X) const;
  Vector to_raw(const Vector& coef_scaled) const;
};

}  // namespace scheds
