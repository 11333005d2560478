#include "scheds/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scheds {

void ScHeDsProblem::check() const {
  auto violations = validate(data);
  if (!violations.empty())
    throw std::invalid_argument("ScHeDsProblem: " + violations.front());
  if (geometry.group_count() != data.partition.group_count())
    throw std::invalid_argument("ScHeDsProblem: geometry/partition mismatch");
  if (lambda.size() != data.partition.group_count())
    throw std::invalid_argument("ScHeDsProblem: lambda length != K");
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (lambda(k) < 0.0)
      throw std::invalid_argument("ScHeDsProblem: negative lambda");
  if (bound_Ly && *bound_Ly <= 0.0)
    throw std::invalid_argument("ScHeDsProblem: bound_Ly must be positive");
  if (bound_mu_star && *bound_mu_star <= 0.0)
    throw std::invalid_argument("ScHeDsProblem: bound_mu_star must be positive");
}

ScHeDsProblem make_problem(RegressionData data) {
  ScHeDsProblem problem;
  problem.geometry = group_geometry(data.X, data.partition);
  problem.lambda = Vector::Zero(data.partition.group_count());
  problem.data = std::move(data);
  return problem;
}

LambdaRule lambda_weights(const GroupGeometry& geometry, double lambda0) {
  if (lambda0 <= 0.0)
    throw std::invalid_argument("lambda_weights: lambda0 must be positive");
  LambdaRule rule;
  rule.mode = LambdaMode::scaled_sqrt_rank;
  rule.lambda0 = lambda0;
  rule.values.resize(geometry.group_count());
  for (int k = 0; k < geometry.group_count(); ++k)
    rule.values(k) = lambda0 * std::sqrt(double(geometry.blocks[k].rank));
  return rule;
}

LambdaRule lambda_weights_theorem2(const GroupGeometry& geometry, int K,
                                   double eps) {
  if (K < 1) throw std::invalid_argument("lambda_weights_theorem2: K < 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("lambda_weights_theorem2: eps outside (0,1)");
  LambdaRule rule;
  rule.mode = LambdaMode::theorem2;
  rule.K_over_eps = K / eps;
  const double log_term = std::log(rule.K_over_eps);
  rule.values.resize(geometry.group_count());
  for (int k = 0; k < geometry.group_count(); ++k) {
    const double r = geometry.blocks[k].rank;
    rule.values(k) =
        r == 0.0
            ? 0.0
            : 2.0 * std::sqrt(r + 2.0 * std::sqrt(r * log_term) + 2.0 * log_term);
  }
  return rule;
}

namespace {

Vector unit(int n, int i) {
  Vector v = Vector::Zero(n);
  v(i) = 1.0;
  return v;
}

}  // namespace

AssembledProgram assemble_program(const ScHeDsProblem& problem,
                                  const Vector& Y) {
  problem.check();
  const Matrix& X = problem.data.X;
  const Matrix& R = problem.data.R;
  if (Y.size() != X.rows())
    throw std::invalid_argument("assemble_program: Y length != T");

  VariableLayout layout;
  layout.p = static_cast<int>(X.cols());
  layout.q = static_cast<int>(R.cols());
  layout.K = problem.data.partition.group_count();
  layout.T = static_cast<int>(X.rows());
  const int n = layout.n();

  ConeProgram prog;
  prog.n = n;
  prog.c = Vector::Zero(n);
  for (int k = 0; k < layout.K; ++k)
    prog.c(layout.u0() + k) = problem.lambda(k);

  const Matrix YR = Y.asDiagonal() * R;  // T x q

  // (9): |Q_k^T (diag(Y) R alpha - X phi)| <= lambda_k, as a cone when
  // lambda_k > 0 and as equality rows otherwise.
  for (int k = 0; k < layout.K; ++k) {
    const auto& block = problem.geometry.blocks[k];
    if (block.rank == 0) continue;
    Matrix A = Matrix::Zero(block.rank, n);
    A.middleCols(layout.phi0(), layout.p) = -(block.Q.transpose() * X);
    A.middleCols(layout.alpha0(), layout.q) = block.Q.transpose() * YR;
    if (problem.lambda(k) > 0.0) {
      SocConstraint cone;
      cone.A = std::move(A);
      cone.b = Vector::Zero(block.rank);
      cone.d = Vector::Zero(n);
      cone.e = problem.lambda(k);
      prog.soc.push_back(std::move(cone));
    } else {
      for (int r = 0; r < block.rank; ++r)
        prog.eq.push_back({Vector(A.row(r)), 0.0});
    }
  }

  // (11c): |X_{:,G_k} phi_{G_k}| = |F_k phi_{G_k}| <= u_k.  With lambda_k = 0
  // the epigraph variable is unused and pinned at zero; a rank-0 group also
  // pins its phi block.
  for (int k = 0; k < layout.K; ++k) {
    const auto& group = problem.data.partition.groups[k];
    const auto& block = problem.geometry.blocks[k];
    if (problem.lambda(k) > 0.0 && block.rank > 0) {
      SocConstraint cone;
      cone.A = Matrix::Zero(block.rank, n);
      for (std::size_t j = 0; j < group.size(); ++j)
        cone.A.col(layout.phi0() + group[j]) = block.F.col(j);
      cone.b = Vector::Zero(block.rank);
      cone.d = unit(n, layout.u0() + k);
      cone.e = 0.0;
      prog.soc.push_back(std::move(cone));
    } else {
      prog.eq.push_back({unit(n, layout.u0() + k), 0.0});
    }
    if (block.rank == 0)
      for (int j : group) prog.eq.push_back({unit(n, layout.phi0() + j), 0.0});
  }

  // (12) == (10): R^T v <= R^T diag(Y) (diag(Y) R alpha - X phi).
  {
    const Matrix RtY2R = YR.transpose() * YR;  // q x q
    const Matrix RtYX = YR.transpose() * X;    // q x p
    for (int l = 0; l < layout.q; ++l) {
      LinearConstraint row;
      row.a = Vector::Zero(n);
      row.a.segment(layout.v0(), layout.T) = R.col(l);
      row.a.segment(layout.alpha0(), layout.q) = -RtY2R.row(l);
      row.a.segment(layout.phi0(), layout.p) = RtYX.row(l);
      row.b = 0.0;
      prog.lin.push_back(std::move(row));
    }
  }

  // Rotated cones: |[v_t; R_t alpha; sqrt(2)]| <= v_t + R_t alpha encodes
  // v_t (R_t alpha) >= 1.
  for (int t = 0; t < layout.T; ++t) {
    SocConstraint cone;
    cone.A = Matrix::Zero(3, n);
    cone.A(0, layout.v0() + t) = 1.0;
    cone.A.row(1).segment(layout.alpha0(), layout.q) = R.row(t);
    cone.b = Vector::Zero(3);
    cone.b(2) = std::sqrt(2.0);
    cone.d = Vector::Zero(n);
    cone.d(layout.v0() + t) = 1.0;
    cone.d.segment(layout.alpha0(), layout.q) = R.row(t);
    cone.e = 0.0;
    prog.soc.push_back(std::move(cone));
  }

  // Optional response bound: |X_t phi| <= Ly R_t alpha and R_t alpha >= 1/Ly.
  if (problem.bound_Ly) {
    const double Ly = *problem.bound_Ly;
    for (int t = 0; t < layout.T; ++t) {
      LinearConstraint up, dn, lo;
      up.a = Vector::Zero(n);
      up.a.segment(layout.phi0(), layout.p) = X.row(t);
      up.a.segment(layout.alpha0(), layout.q) = -Ly * R.row(t);
      up.b = 0.0;
      dn.a = Vector::Zero(n);
      dn.a.segment(layout.phi0(), layout.p) = -X.row(t);
      dn.a.segment(layout.alpha0(), layout.q) = -Ly * R.row(t);
      dn.b = 0.0;
      lo.a = Vector::Zero(n);
      lo.a.segment(layout.alpha0(), layout.q) = -R.row(t);
      lo.b = -1.0 / Ly;
      prog.lin.push_back(std::move(up));
      prog.lin.push_back(std::move(dn));
      prog.lin.push_back(std::move(lo));
    }
  }

  // Optional scale cap: R_t alpha <= mu*.
  if (problem.bound_mu_star) {
    for (int t = 0; t < layout.T; ++t) {
      LinearConstraint row;
      row.a = Vector::Zero(n);
      row.a.segment(layout.alpha0(), layout.q) = R.row(t);
      row.b = *problem.bound_mu_star;
      prog.lin.push_back(std::move(row));
    }
  }

  return AssembledProgram{std::move(prog), layout};
}

double support_threshold(const Vector& phi) {
  return 1e-5 * std::max(1.0, phi.norm());
}

std::vector<int> select_groups(const Vector& phi,
                               const GroupPartition& partition) {
  const double threshold = support_threshold(phi);
  std::vector<int> selected;
  for (int k = 0; k < partition.group_count(); ++k) {
    double norm2 = 0.0;
    for (int j : partition.groups[k]) norm2 += phi(j) * phi(j);
    if (std::sqrt(norm2) > threshold) selected.push_back(k);
  }
  return selected;
}

namespace {

ScHeDsEstimate extract_estimate(const ScHeDsProblem& problem,
                                const VariableLayout& layout,
                                const ConeSolution& solution,
                                const std::string& method) {
  ScHeDsEstimate est;
  est.phi_hat = solution.x.segment(layout.phi0(), layout.p);
  est.alpha_hat = solution.x.segment(layout.alpha0(), layout.q);
  est.v_hat = solution.x.segment(layout.v0(), layout.T);
  const Vector ra = problem.data.R * est.alpha_hat;
  est.sigma_hat = ra.cwiseInverse();
  est.mean_hat = (problem.data.X * est.phi_hat).cwiseQuotient(ra);
  est.selected_groups = select_groups(est.phi_hat, problem.data.partition);
  est.solver_report = SolverReport{method,
                                   solution.status,
                                   solution.objective,
                                   solution.primal_residual,
                                   solution.gap_proxy,
                                   solution.iterations,
                                   solution.seconds_per_iteration};
  return est;
}

}  // namespace

ScHeDsEstimate fit(const ScHeDsProblem& problem, const Vector& Y,
                   const SolverConfig& config) {
  const auto assembled = assemble_program(problem, Y);
  const ConeSolution solution = solve(assembled.program, config);
  return extract_estimate(problem, assembled.layout, solution,
                          to_string(config.algorithm));
}

ScHeDsEstimate fit(const ScHeDsProblem& problem, const SolverConfig& config) {
  return fit(problem, problem.data.Y, config);
}

std::vector<ConstraintSlack> check_feasible(const ScHeDsProblem& problem,
                                            const Vector& Y, const Vector& phi,
                                            const Vector& alpha,
                                            const Vector& v) {
  const Matrix& X = problem.data.X;
  const Matrix& R = problem.data.R;
  if (phi.size() != X.cols() || alpha.size() != R.cols() ||
      v.size() != X.rows() || Y.size() != X.rows())
    throw std::invalid_argument("check_feasible: dimension mismatch");

  std::vector<ConstraintSlack> slacks;
  const Vector resid = Y.cwiseProduct(R * alpha) - X * phi;
  for (int k = 0; k < problem.geometry.group_count(); ++k) {
    const auto& block = problem.geometry.blocks[k];
    const double norm = block.rank > 0 ? (block.Q.transpose() * resid).norm() : 0.0;
    slacks.push_back({ConstraintFamily::group_dantzig, k,
                      problem.lambda(k) - norm});
  }
  const Vector lhs10 = R.transpose() * v;
  const Vector rhs10 = R.transpose() * Y.cwiseProduct(resid);
  for (Eigen::Index l = 0; l < lhs10.size(); ++l)
    slacks.push_back({ConstraintFamily::variance_rows, static_cast<int>(l),
                      rhs10(l) - lhs10(l)});
  const Vector ra = R * alpha;
  for (Eigen::Index t = 0; t < v.size(); ++t) {
    double slack;
    if (v(t) > 0.0 && ra(t) > 0.0)
      slack = v(t) * ra(t) - 1.0;
    else
      slack = std::min({v(t), ra(t), -1.0});
    slacks.push_back({ConstraintFamily::rotated_cone, static_cast<int>(t), slack});
  }
  if (problem.bound_Ly) {
    const Vector mean_abs = (X * phi).cwiseAbs();
    for (Eigen::Index t = 0; t < v.size(); ++t) {
      slacks.push_back({ConstraintFamily::bound_response, static_cast<int>(t),
                        *problem.bound_Ly * ra(t) - mean_abs(t)});
      slacks.push_back({ConstraintFamily::bound_response,
                        static_cast<int>(v.size() + t),
                        ra(t) - 1.0 / *problem.bound_Ly});
    }
  }
  if (problem.bound_mu_star)
    for (Eigen::Index t = 0; t < v.size(); ++t)
      slacks.push_back({ConstraintFamily::bound_scale, static_cast<int>(t),
                        *problem.bound_mu_star - ra(t)});
  return slacks;
}

std::vector<ConstraintSlack> check_feasible(const ScHeDsProblem& problem,
                                            const Vector& phi,
                                            const Vector& alpha,
                                            const Vector& v) {
  return check_feasible(problem, problem.data.Y, phi, alpha, v);
}

double min_slack(const std::vector<ConstraintSlack>& slacks) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : slacks) m = std::min(m, s.slack);
  return m;
}

SaturationReport saturation_residual(const ScHeDsProblem& problem,
                                     const ScHeDsEstimate& estimate,
                                     const Vector& Y) {
  const Matrix& R = problem.data.R;
  const Matrix& X = problem.data.X;
  const Vector ra = R * estimate.alpha_hat;
  for (Eigen::Index t = 0; t < ra.size(); ++t)
    if (ra(t) <= 0.0)
      throw std::domain_error("saturation_residual: R alpha not positive");
  SaturationReport report;
  report.lhs = R.transpose() * ra.cwiseInverse();
  const Vector resid = Y.cwiseProduct(ra) - X * estimate.phi_hat;
  report.rhs = R.transpose() * Y.cwiseProduct(resid);
  return report;
}

MleRefit penalized_likelihood_refit(const Matrix& X, const Vector& Y,
                                    const Matrix& R, const Vector& alpha0) {
  const int T = static_cast<int>(X.rows());
  const int s = static_cast<int>(X.cols());
  const int q = static_cast<int>(R.cols());
  if (Y.size() != T || R.rows() != T || alpha0.size() != q)
    throw std::invalid_argument("penalized_likelihood_refit: dimension mismatch");

  Vector alpha = alpha0;
  if (((R * alpha).array() <= 0.0).any()) {
    // fall back to a uniform positive start
    alpha = Vector::Zero(q);
    Vector row_mean = R.colwise().mean();
    const double denom = row_mean.squaredNorm();
    if (denom <= 0.0)
      throw std::invalid_argument("penalized_likelihood_refit: degenerate R");
    alpha = row_mean / denom;  // makes R alpha approx 1 on average
    if (((R * alpha).array() <= 0.0).any())
      throw std::invalid_argument(
          "penalized_likelihood_refit: no positive starting scale");
  }

  const Matrix YR = Y.asDiagonal() * R;
  const Matrix XtX = X.transpose() * X;
  const Matrix XtYR = X.transpose() * YR;

  // phi given alpha is a least-squares solve; start there.
  Eigen::LDLT<Matrix> xtx_ldlt(
      XtX + 1e-12 * (XtX.diagonal().maxCoeff() + 1.0) *
                Matrix::Identity(s, s));
  Vector phi = xtx_ldlt.solve(XtYR * alpha);

  const auto objective = [&](const Vector& ph, const Vector& al) {
    const Vector ra = R * al;
    const Vector resid = Y.cwiseProduct(ra) - X * ph;
    return -ra.array().log().sum() + 0.5 * resid.squaredNorm();
  };

  MleRefit out;
  double f = objective(phi, alpha);
  for (int it = 0; it < 100; ++it) {
    out.iterations = it + 1;
    const Vector ra = R * alpha;
    const Vector inv_ra = ra.cwiseInverse();
    const Vector resid = Y.cwiseProduct(ra) - X * phi;

    Vector g(s + q);
    g.head(s) = -(X.transpose() * resid);
    g.tail(q) = -(R.transpose() * inv_ra) + YR.transpose() * resid;

    Matrix H(s + q, s + q);
    H.topLeftCorner(s, s) = XtX;
    H.topRightCorner(s, q) = -XtYR;
    H.bottomLeftCorner(q, s) = -XtYR.transpose();
    const Matrix Rw = inv_ra.asDiagonal() * R;
    H.bottomRightCorner(q, q) = YR.transpose() * YR + Rw.transpose() * Rw;
    H.diagonal().array() += 1e-12 * (H.diagonal().cwiseAbs().maxCoeff() + 1.0);

    const Vector step = Eigen::LDLT<Matrix>(H).solve(-g);
    const double decrement = -g.dot(step);
    double t_ls = 1.0;
    Vector phi_new, alpha_new;
    double f_new = f;
    bool moved = false;
    while (t_ls > 1e-14) {
      phi_new = phi + t_ls * step.head(s);
      alpha_new = alpha + t_ls * step.tail(q);
      if (((R * alpha_new).array() > 0.0).all()) {
        f_new = objective(phi_new, alpha_new);
        if (f_new <= f - 1e-4 * t_ls * decrement) {
          moved = true;
          break;
        }
      }
      t_ls *= 0.5;
    }
    if (!moved) break;
    phi = phi_new;
    alpha = alpha_new;
    f = f_new;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + std::abs(f)) ||
        decrement < 1e-18 * (1.0 + std::abs(f))) {
      out.converged = true;
      break;
    }
  }
  // final gradient check
  {
    const Vector ra = R * alpha;
    const Vector resid = Y.cwiseProduct(ra) - X * phi;
    Vector g(s + q);
    g.head(s) = -(X.transpose() * resid);
    g.tail(q) = -(R.transpose() * ra.cwiseInverse()) + YR.transpose() * resid;
    out.converged = g.lpNorm<Eigen::Infinity>() <= 1e-7 * (1.0 + std::abs(f));
  }
  out.phi = phi;
  out.alpha = alpha;
  out.objective = f;
  return out;
}

ScHeDsEstimate bias_correct(const ScHeDsProblem& problem,
                            const ScHeDsEstimate& estimate, const Vector& Y,
                            const SolverConfig& config) {
  (void)config;
  if (estimate.selected_groups.empty()) return estimate;

  std::vector<int> columns;
  for (int k : estimate.selected_groups)
    for (int j : problem.data.partition.groups[k]) columns.push_back(j);
  if (columns.empty())
    throw std::invalid_argument("bias_correct: reduced design empty");

  Matrix Xs(problem.data.X.rows(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j)
    Xs.col(j) = problem.data.X.col(columns[j]);

  const auto t0 = std::chrono::steady_clock::now();
  const MleRefit refit =
      penalized_likelihood_refit(Xs, Y, problem.data.R, estimate.alpha_hat);
  const auto t1 = std::chrono::steady_clock::now();

  ScHeDsEstimate out;
  out.phi_hat = Vector::Zero(problem.data.X.cols());
  for (std::size_t j = 0; j < columns.size(); ++j)
    out.phi_hat(columns[j]) = refit.phi(j);
  out.alpha_hat = refit.alpha;
  const Vector ra = problem.data.R * refit.alpha;
  out.v_hat = ra.cwiseInverse();
  out.sigma_hat = out.v_hat;
  out.mean_hat = (problem.data.X * out.phi_hat).cwiseQuotient(ra);
  out.selected_groups = select_groups(out.phi_hat, problem.data.partition);
  out.solver_report = SolverReport{
      "newton_refit",
      refit.converged ? SolveStatus::optimal : SolveStatus::max_iter,
      refit.objective,
      0.0,
      0.0,
      refit.iterations,
      std::chrono::duration<double>(t1 - t0).count() /
          std::max(1, refit.iterations)};
  out.bias_corrected = true;
  return out;
}

double predict(const ScHeDsEstimate& estimate, const Vector& f_values,
               const Vector& r_values) {
  if (f_values.size() != estimate.phi_hat.size() ||
      r_values.size() != estimate.alpha_hat.size())
    throw std::invalid_argument("predict: dimension mismatch");
  const double denom = estimate.alpha_hat.dot(r_values);
  if (!(denom > 0.0))
    throw std::domain_error("predict: non-positive scale denominator");
  return estimate.phi_hat.dot(f_values) / denom;
}

}  // namespace scheds
