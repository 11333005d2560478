#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "scheds/model.hpp"

namespace scheds {

/// a^T x <= b
struct LinearConstraint {
  Vector a;
  double b = 0.0;
};

/// |A x + b|_2 <= d^T x + e
struct SocConstraint {
  Matrix A;
  Vector b;
  Vector d;
  double e = 0.0;
};

/// a^T x = b.  Used by the zero-penalty refit path, where constraint (9)
/// collapses to an equality; everywhere else the list stays empty.
struct EqConstraint {
  Vector a;
  double b = 0.0;
};

/// Standard-form program: minimize c^T x subject to the listed constraints.
struct ConeProgram {
  int n = 0;
  Vector c;
  std::vector<LinearConstraint> lin;
  std::vector<SocConstraint> soc;
  std::vector<EqConstraint> eq;

  void check_dimensions() const;  // throws std::invalid_argument
};

enum class Algorithm { interior_point, first_order };

struct SolverConfig {
  Algorithm algorithm = Algorithm::interior_point;
  double tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;

  static SolverConfig interior_point(double tol = 1e-8, int max_iter = 200) {
    return SolverConfig{Algorithm::interior_point, tol, max_iter, false};
  }
  static SolverConfig first_order(double tol = 1e-5, int max_iter = 50000) {
    return SolverConfig{Algorithm::first_order, tol, max_iter, false};
  }
};

enum class SolveStatus { optimal, max_iter, infeasible_suspected };

std::string to_string(SolveStatus status);
std::string to_string(Algorithm algorithm);

struct ConeSolution {
  Vector x;
  SolveStatus status = SolveStatus::max_iter;
  double objective = 0.0;
  double primal_residual = 0.0;  // max constraint violation at x
  double gap_proxy = 0.0;        // relative optimality measure
  int iterations = 0;
  double seconds_per_iteration = 0.0;
};

/// Solve with the configured algorithm.  Infeasibility is reported as
/// SolveStatus::infeasible_suspected (divergence heuristics, no certificate).
ConeSolution solve(const ConeProgram& program, const SolverConfig& config);

/// Euclidean projection onto {(z, t) : |z|_2 <= t}; the apex coordinate t
/// sits at index `split` of `point` and z is the rest in order.
Vector soc_project(const Vector& point, int split);

/// (max linear violation, max second-order-cone violation) at x; equality
/// rows count toward the linear part with |a^T x - b|.
std::pair<double, double> residuals(const ConeProgram& program, const Vector& x);

/// Plain-text round-trippable dump, one constraint per line.
std::string dump_program(const ConeProgram& program);
ConeProgram parse_program(std::istream& in);
ConeProgram parse_program(const std::string& text);

namespace detail {

/// Internal conic standard form:  min c^T x  s.t.  A x = b,  G x + s = h,
/// s in R+^nonneg x SOC(d_1) x ... x SOC(d_N).  One-row SOC constraints are
/// folded into the nonnegative block by the builder.
struct StandardForm {
  int n = 0;
  Vector c;
  Matrix A;  // me x n (me may be 0)
  Vector b;
  Matrix G;  // m x n
  Vector h;
  int nonneg = 0;
  std::vector<int> soc_dims;

  int cone_rows() const { return static_cast<int>(G.rows()); }
  int eq_rows() const { return static_cast<int>(A.rows()); }
};

StandardForm build_standard_form(const ConeProgram& program);

ConeSolution solve_interior_point(const StandardForm& form,
                                  const SolverConfig& config);
ConeSolution solve_first_order(const StandardForm& form,
                               const SolverConfig& config);

}  // namespace detail

}  // namespace scheds
