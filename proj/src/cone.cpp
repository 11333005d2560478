#include "scheds/cone.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scheds {

void ConeProgram::check_dimensions() const {
  if (n < 1) throw std::invalid_argument("ConeProgram: n must be >= 1");
  if (c.size() != n)
    throw std::invalid_argument("ConeProgram: objective length != n");
  for (std::size_t i = 0; i < lin.size(); ++i)
    if (lin[i].a.size() != n)
      throw std::invalid_argument("ConeProgram: linear row " +
                                  std::to_string(i) + " has wrong length");
  for (std::size_t i = 0; i < eq.size(); ++i)
    if (eq[i].a.size() != n)
      throw std::invalid_argument("ConeProgram: equality row " +
                                  std::to_string(i) + " has wrong length");
  for (std::size_t i = 0; i < soc.size(); ++i) {
    const auto& s = soc[i];
    if (s.A.cols() != n || s.d.size() != n || s.b.size() != s.A.rows())
      throw std::invalid_argument("ConeProgram: cone " + std::to_string(i) +
                                  " has inconsistent dimensions");
  }
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible_suspected: return "infeasible_suspected";
  }
  return "unknown";
}

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::interior_point ? "interior_point"
                                                : "first_order";
}

ConeSolution solve(const ConeProgram& program, const SolverConfig& config) {
  program.check_dimensions();
  if (config.tol <= 0.0) throw std::invalid_argument("SolverConfig: tol <= 0");
  if (config.max_iter < 1)
    throw std::invalid_argument("SolverConfig: max_iter < 1");

  const auto form = detail::build_standard_form(program);
  ConeSolution solution = config.algorithm == Algorithm::interior_point
                              ? detail::solve_interior_point(form, config)
                              : detail::solve_first_order(form, config);

  solution.objective = program.c.dot(solution.x);
  const auto [lin_violation, soc_violation] = residuals(program, solution.x);
  solution.primal_residual = std::max(lin_violation, soc_violation);
  if (solution.status == SolveStatus::optimal &&
      solution.primal_residual >
          config.tol * (1.0 + solution.x.lpNorm<Eigen::Infinity>()) * 10.0) {
    solution.status = SolveStatus::max_iter;
  }
  return solution;
}

Vector soc_project(const Vector& point, int split) {
  if (split < 0 || split >= point.size())
    throw std::invalid_argument("soc_project: apex index out of range");
  const double t = point(split);
  Vector z(point.size() - 1);
  int idx = 0;
  for (Eigen::Index i = 0; i < point.size(); ++i)
    if (i != split) z(idx++) = point(i);

  const double nz = z.norm();
  Vector out = point;
  if (nz <= t) return out;        // inside the cone
  if (nz <= -t) return Vector::Zero(point.size());  // inside the polar cone
  const double scale = (nz + t) / 2.0;
  z *= scale / nz;
  idx = 0;
  for (Eigen::Index i = 0; i < point.size(); ++i)
    out(i) = (i == static_cast<Eigen::Index>(split)) ? scale : z(idx++);
  return out;
}

std::pair<double, double> residuals(const ConeProgram& program,
                                    const Vector& x) {
  if (x.size() != program.n)
    throw std::invalid_argument("residuals: x has wrong length");
  double lin_violation = 0.0;
  for (const auto& row : program.lin)
    lin_violation = std::max(lin_violation, row.a.dot(x) - row.b);
  for (const auto& row : program.eq)
    lin_violation = std::max(lin_violation, std::abs(row.a.dot(x) - row.b));
  double soc_violation = 0.0;
  for (const auto& cone : program.soc) {
    const double lhs = (cone.A * x + cone.b).norm();
    const double rhs = cone.d.dot(x) + cone.e;
    soc_violation = std::max(soc_violation, lhs - rhs);
  }
  return {std::max(0.0, lin_violation), std::max(0.0, soc_violation)};
}

namespace detail {

StandardForm build_standard_form(const ConeProgram& program) {
  StandardForm form;
  form.n = program.n;
  form.c = program.c;

  form.A.resize(program.eq.size(), program.n);
  form.b.resize(program.eq.size());
  for (std::size_t i = 0; i < program.eq.size(); ++i) {
    form.A.row(i) = program.eq[i].a.transpose();
    form.b(i) = program.eq[i].b;
  }

  // Zero-row cones |b| <= d^T x + e behave like single linear rows.
  int nonneg = static_cast<int>(program.lin.size());
  int soc_rows = 0;
  for (const auto& cone : program.soc) {
    if (cone.A.rows() == 0)
      ++nonneg;
    else
      soc_rows += static_cast<int>(cone.A.rows()) + 1;
  }

  form.nonneg = nonneg;
  form.G.setZero(nonneg + soc_rows, program.n);
  form.h.resize(nonneg + soc_rows);

  int row = 0;
  for (const auto& lin : program.lin) {
    form.G.row(row) = lin.a.transpose();
    form.h(row) = lin.b;
    ++row;
  }
  for (const auto& cone : program.soc) {
    if (cone.A.rows() != 0) continue;
    form.G.row(row) = -cone.d.transpose();
    form.h(row) = cone.e - cone.b.norm();
    ++row;
  }
  for (const auto& cone : program.soc) {
    if (cone.A.rows() == 0) continue;
    form.G.row(row) = -cone.d.transpose();
    form.h(row) = cone.e;
    form.G.middleRows(row + 1, cone.A.rows()) = -cone.A;
    form.h.segment(row + 1, cone.A.rows()) = cone.b;
    form.soc_dims.push_back(static_cast<int>(cone.A.rows()) + 1);
    row += static_cast<int>(cone.A.rows()) + 1;
  }
  return form;
}

}  // namespace detail

namespace {

void dump_vector(std::ostringstream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
}

Vector read_vector(std::istringstream& in, int n, const char* what) {
  Vector v(n);
  for (int i = 0; i < n; ++i)
    if (!(in >> v(i)))
      throw std::runtime_error(std::string("program parse: truncated ") + what);
  return v;
}

}  // namespace

std::string dump_program(const ConeProgram& program) {
  std::ostringstream out;
  out.precision(17);
  out << "socp " << program.n << '\n';
  out << "min";
  dump_vector(out, program.c);
  out << '\n';
  for (const auto& lin : program.lin) {
    out << "lin " << lin.b;
    dump_vector(out, lin.a);
    out << '\n';
  }
  for (const auto& eq : program.eq) {
    out << "eq " << eq.b;
    dump_vector(out, eq.a);
    out << '\n';
  }
  for (const auto& cone : program.soc) {
    out << "soc " << cone.A.rows() << ' ' << cone.e;
    dump_vector(out, cone.d);
    out << '\n';
    for (Eigen::Index r = 0; r < cone.A.rows(); ++r) {
      out << "row " << cone.b(r);
      dump_vector(out, Vector(cone.A.row(r)));
      out << '\n';
    }
  }
  return out.str();
}

ConeProgram parse_program(std::istream& in) {
  ConeProgram program;
  std::string line;
  bool have_header = false;
  int pending_rows = 0;
  SocConstraint* current = nullptr;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    const auto fail = [&](const std::string& msg) {
      throw std::runtime_error("program parse: line " + std::to_string(lineno) +
                               ": " + msg);
    };
    if (!have_header) {
      if (tag != "socp") fail("expected 'socp <n>' header");
      if (!(ls >> program.n) || program.n < 1) fail("bad variable count");
      have_header = true;
      continue;
    }
    if (tag == "min") {
      program.c = read_vector(ls, program.n, "objective");
    } else if (tag == "lin") {
      LinearConstraint lin;
      if (!(ls >> lin.b)) fail("bad linear bound");
      lin.a = read_vector(ls, program.n, "linear row");
      program.lin.push_back(std::move(lin));
    } else if (tag == "eq") {
      EqConstraint eq;
      if (!(ls >> eq.b)) fail("bad equality value");
      eq.a = read_vector(ls, program.n, "equality row");
      program.eq.push_back(std::move(eq));
    } else if (tag == "soc") {
      if (pending_rows > 0) fail("previous cone incomplete");
      SocConstraint cone;
      int rows = 0;
      if (!(ls >> rows >> cone.e) || rows < 0) fail("bad cone header");
      cone.d = read_vector(ls, program.n, "cone gradient");
      cone.A.setZero(rows, program.n);
      cone.b.setZero(rows);
      program.soc.push_back(std::move(cone));
      current = &program.soc.back();
      pending_rows = rows;
    } else if (tag == "row") {
      if (pending_rows <= 0 || current == nullptr) fail("unexpected 'row'");
      const int r = static_cast<int>(current->A.rows()) - pending_rows;
      if (!(ls >> current->b(r))) fail("bad cone row offset");
      current->A.row(r) = read_vector(ls, program.n, "cone row").transpose();
      --pending_rows;
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!have_header) throw std::runtime_error("program parse: empty input");
  if (pending_rows > 0) throw std::runtime_error("program parse: truncated cone");
  if (program.c.size() != program.n)
    throw std::runtime_error("program parse: missing objective");
  program.check_dimensions();
  return program;
}

ConeProgram parse_program(const std::string& text) {
  std::istringstream in(text);
  return parse_program(in);
}

}  // namespace scheds
