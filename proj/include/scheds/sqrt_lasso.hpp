#pragma once

#include <vector>

#include "scheds/cone.hpp"
#include "scheds/estimator.hpp"
#include "scheds/model.hpp"

namespace scheds {

struct SqrtLassoEstimate {
  Vector beta_hat;        // p
  double sigma_hat = 0.0; // |Y - X beta|_2 / sqrt(T)
  std::vector<int> selected;
  Vector column_weights;  // |X_:j|_2 used in the penalty
  SolverReport solver_report;
  bool bias_corrected = false;
};

/// minimize |Y - X beta|_2 + lambda sum_j |X_:j|_2 |beta_j|, cast as an SOCP
/// over (beta, t, s):  min t + lambda sum w_j s_j, |Y - X beta| <= t,
/// +-beta_j <= s_j.  Support uses the same threshold rule as the group
/// estimator so the sparsity counts are comparable.
SqrtLassoEstimate sqrt_lasso(const Matrix& X, const Vector& Y, double lambda,
                             const SolverConfig& config);

/// Least-squares refit on the selected columns; sigma from stage-2 residuals.
/// An estimate with empty support is returned unchanged.
SqrtLassoEstimate sqrt_lasso_bias_correct(const Matrix& X, const Vector& Y,
                                          const SqrtLassoEstimate& estimate,
                                          const SolverConfig& config);

/// Objective of the penalized problem at beta (optimality spot checks).
double sqrt_lasso_objective(const Matrix& X, const Vector& Y, double lambda,
                            const Vector& beta);

}  // namespace scheds
