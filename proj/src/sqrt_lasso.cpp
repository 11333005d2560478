#include "scheds/sqrt_lasso.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace scheds {

double sqrt_lasso_objective(const Matrix& X, const Vector& Y, double lambda,
                            const Vector& beta) {
  double penalty = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    penalty += X.col(j).norm() * std::abs(beta(j));
  return (Y - X * beta).norm() + lambda * penalty;
}

SqrtLassoEstimate sqrt_lasso(const Matrix& X, const Vector& Y, double lambda,
                             const SolverConfig& config) {
  if (lambda < 0.0) throw std::invalid_argument("sqrt_lasso: lambda < 0");
  if (Y.size() != X.rows())
    throw std::invalid_argument("sqrt_lasso: Y length != rows(X)");
  const int T = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const int n = 2 * p + 1;  // (beta, t, s)
  const int t_idx = p;
  const int s0 = p + 1;

  Vector weights = X.colwise().norm();

  ConeProgram prog;
  prog.n = n;
  prog.c = Vector::Zero(n);
  prog.c(t_idx) = 1.0;
  for (int j = 0; j < p; ++j) prog.c(s0 + j) = lambda * weights(j);

  SocConstraint fitcone;
  fitcone.A = Matrix::Zero(T, n);
  fitcone.A.leftCols(p) = -X;
  fitcone.b = Y;
  fitcone.d = Vector::Zero(n);
  fitcone.d(t_idx) = 1.0;
  fitcone.e = 0.0;
  prog.soc.push_back(std::move(fitcone));

  for (int j = 0; j < p; ++j) {
    LinearConstraint up, dn;
    up.a = Vector::Zero(n);
    up.a(j) = 1.0;
    up.a(s0 + j) = -1.0;
    up.b = 0.0;
    dn.a = Vector::Zero(n);
    dn.a(j) = -1.0;
    dn.a(s0 + j) = -1.0;
    dn.b = 0.0;
    prog.lin.push_back(std::move(up));
    prog.lin.push_back(std::move(dn));
  }

  const ConeSolution solution = solve(prog, config);

  SqrtLassoEstimate est;
  est.beta_hat = solution.x.head(p);
  est.sigma_hat = (Y - X * est.beta_hat).norm() / std::sqrt(double(T));
  est.column_weights = std::move(weights);
  const double threshold = support_threshold(est.beta_hat);
  for (int j = 0; j < p; ++j)
    if (std::abs(est.beta_hat(j)) > threshold) est.selected.push_back(j);
  est.solver_report = SolverReport{to_string(config.algorithm),
                                   solution.status,
                                   solution.objective,
                                   solution.primal_residual,
                                   solution.gap_proxy,
                                   solution.iterations,
                                   solution.seconds_per_iteration};
  return est;
}

SqrtLassoEstimate sqrt_lasso_bias_correct(const Matrix& X, const Vector& Y,
                                          const SqrtLassoEstimate& estimate,
                                          const SolverConfig& config) {
  (void)config;
  if (estimate.selected.empty()) return estimate;
  const int T = static_cast<int>(X.rows());
  Matrix Xs(T, estimate.selected.size());
  for (std::size_t j = 0; j < estimate.selected.size(); ++j)
    Xs.col(j) = X.col(estimate.selected[j]);

  const Matrix XtX = Xs.transpose() * Xs;
  Eigen::LDLT<Matrix> ldlt(XtX + 1e-12 * (XtX.diagonal().maxCoeff() + 1.0) *
                                     Matrix::Identity(Xs.cols(), Xs.cols()));
  const Vector beta_s = ldlt.solve(Xs.transpose() * Y);

  SqrtLassoEstimate out = estimate;
  out.beta_hat = Vector::Zero(X.cols());
  for (std::size_t j = 0; j < estimate.selected.size(); ++j)
    out.beta_hat(estimate.selected[j]) = beta_s(j);
  out.sigma_hat = (Y - Xs * beta_s).norm() / std::sqrt(double(T));
  out.bias_corrected = true;
  out.solver_report.method = "least_squares_refit";
  return out;
}

}  // namespace scheds
