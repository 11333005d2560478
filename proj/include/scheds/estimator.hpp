#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scheds/cone.hpp"
#include "scheds/model.hpp"

namespace scheds {

/// Problem bundle for the scaled heteroscedastic Dantzig selector.
struct ScHeDsProblem {
  RegressionData data;
  GroupGeometry geometry;
  Vector lambda;                        // length K, all >= 0
  std::optional<double> bound_Ly;       // known response bound
  std::optional<double> bound_mu_star;  // cap on R_{t,:} alpha

  void check() const;  // throws std::invalid_argument on inconsistency
};

/// Builds geometry from the data; lambda starts at zero.
ScHeDsProblem make_problem(RegressionData data);

enum class LambdaMode { scaled_sqrt_rank, theorem2 };

struct LambdaRule {
  LambdaMode mode = LambdaMode::scaled_sqrt_rank;
  double lambda0 = 0.0;     // scaled_sqrt_rank
  double K_over_eps = 0.0;  // theorem2
  Vector values;
};

/// lambda_k = lambda0 * sqrt(r_k)
LambdaRule lambda_weights(const GroupGeometry& geometry, double lambda0);
/// lambda_k = 2 (r_k + 2 sqrt(r_k log(K/eps)) + 2 log(K/eps))^{1/2};
/// degenerate rank-0 groups get lambda_k = 0 in both modes.
LambdaRule lambda_weights_theorem2(const GroupGeometry& geometry, int K,
                                   double eps);

/// Variable order (phi, alpha, u, v) in the assembled cone program.
struct VariableLayout {
  int p = 0, q = 0, K = 0, T = 0;
  int phi0() const { return 0; }
  int alpha0() const { return p; }
  int u0() const { return p + q; }
  int v0() const { return p + q + K; }
  int n() const { return p + q + K + T; }
};

struct AssembledProgram {
  ConeProgram program;
  VariableLayout layout;
};

/// Cone program of the estimator: minimize sum_k lambda_k u_k subject to the
/// group Dantzig constraints, |X_{:,G_k} phi_{G_k}| <= u_k, the variance
/// rows, one rotated cone per observation, and the optional bounds.
/// Groups with lambda_k = 0 contribute equality rows instead of a cone.
AssembledProgram assemble_program(const ScHeDsProblem& problem,
                                  const Vector& Y);

struct SolverReport {
  std::string method;
  SolveStatus status = SolveStatus::max_iter;
  double objective = 0.0;
  double primal_residual = 0.0;
  double gap_proxy = 0.0;
  int iterations = 0;
  double seconds_per_iteration = 0.0;
};

struct ScHeDsEstimate {
  Vector phi_hat;    // p
  Vector alpha_hat;  // q
  Vector v_hat;      // T
  Vector sigma_hat;  // T, 1 / (R alpha)
  Vector mean_hat;   // T, (X phi) / (R alpha)
  std::vector<int> selected_groups;
  SolverReport solver_report;
  bool bias_corrected = false;
};

/// Group k is selected iff |phi_{G_k}|_2 > 1e-5 * max(1, |phi|_2).
double support_threshold(const Vector& phi);
std::vector<int> select_groups(const Vector& phi, const GroupPartition& partition);

/// Fit on the given responses (the data's own Y is ignored so that scaled
/// responses can be fitted against the same problem).  Non-optimal solver
/// status is propagated in the report with the partial estimate attached.
ScHeDsEstimate fit(const ScHeDsProblem& problem, const Vector& Y,
                   const SolverConfig& config);
ScHeDsEstimate fit(const ScHeDsProblem& problem, const SolverConfig& config);

enum class ConstraintFamily {
  group_dantzig,   // (9)
  variance_rows,   // (10)
  rotated_cone,    // (11)
  bound_response,
  bound_scale,
};

struct ConstraintSlack {
  ConstraintFamily family;
  int index;
  double slack;  // >= 0 iff satisfied
};

std::vector<ConstraintSlack> check_feasible(const ScHeDsProblem& problem,
                                            const Vector& Y, const Vector& phi,
                                            const Vector& alpha,
                                            const Vector& v);
std::vector<ConstraintSlack> check_feasible(const ScHeDsProblem& problem,
                                            const Vector& phi,
                                            const Vector& alpha,
                                            const Vector& v);
double min_slack(const std::vector<ConstraintSlack>& slacks);

/// Saturation identity of the optimal estimate: for each dictionary column,
/// lhs = sum_t r_tl / (R_t alpha) equals rhs = sum_t (y_t R_t alpha -
/// X_t phi) y_t r_tl at the optimum; residual = lhs - rhs.
struct SaturationReport {
  Vector lhs, rhs;
  Vector residual() const { return lhs - rhs; }
};

SaturationReport saturation_residual(const ScHeDsProblem& problem,
                                     const ScHeDsEstimate& estimate,
                                     const Vector& Y);

/// Two-step bias correction: keep the selected groups, drop the rest, and
/// refit with zero penalty (an unpenalized likelihood refit on the reduced
/// design).  An estimate with empty support is returned unchanged.
ScHeDsEstimate bias_correct(const ScHeDsProblem& problem,
                            const ScHeDsEstimate& estimate, const Vector& Y,
                            const SolverConfig& config);

/// Plug-in prediction (sum_j phi_j f_j) / (sum_l alpha_l r_l); the
/// denominator must be positive.
double predict(const ScHeDsEstimate& estimate, const Vector& f_values,
               const Vector& r_values);

/// Damped-Newton maximizer of the zero-penalty likelihood; used by the
/// second stage and exposed for its test oracle.
struct MleRefit {
  Vector phi;
  Vector alpha;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

MleRefit penalized_likelihood_refit(const Matrix& X, const Vector& Y,
                                    const Matrix& R, const Vector& alpha0);

}  // namespace scheds
