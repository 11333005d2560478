#include <chrono>
#include <cmath>
#include <stdexcept>

#include "scheds/cone.hpp"

#include <Eigen/Cholesky>

// Operator-splitting (ADMM) solver for the same conic standard form as the
// interior-point method.  Equality rows are treated as a zero cone.  The
// x-update matrix C^T C + sigma I is independent of the penalty parameter,
// so rho rescaling needs no refactorization.

namespace scheds::detail {

namespace {

struct ConeLayout {
  int zero = 0;
  int nonneg = 0;
  std::vector<int> soc_dims;
  std::vector<int> soc_offsets;
};

void project(const ConeLayout& layout, Vector& v) {
  v.head(layout.zero).setZero();
  for (int i = layout.zero; i < layout.zero + layout.nonneg; ++i)
    v(i) = std::max(0.0, v(i));
  for (std::size_t k = 0; k < layout.soc_dims.size(); ++k) {
    const int off = layout.soc_offsets[k];
    const int d = layout.soc_dims[k];
    auto block = v.segment(off, d);
    const double t = block(0);
    const double nz = block.tail(d - 1).norm();
    if (nz <= t) continue;
    if (nz <= -t) {
      block.setZero();
    } else {
      const double scale = (nz + t) / 2.0;
      block.tail(d - 1) *= scale / nz;
      block(0) = scale;
    }
  }
}

}  // namespace

ConeSolution solve_first_order(const StandardForm& form,
                               const SolverConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = form.n;
  const int me = form.eq_rows();
  const int mc = form.cone_rows();
  const int m = me + mc;
  if (mc == 0 && me == 0)
    throw std::invalid_argument("first order: program has no constraints");

  Matrix C(m, n);
  Vector d(m);
  if (me > 0) {
    C.topRows(me) = form.A;
    d.head(me) = form.b;
  }
  C.bottomRows(mc) = form.G;
  d.tail(mc) = form.h;

  ConeLayout layout;
  layout.zero = me;
  layout.nonneg = form.nonneg;
  int off = me + form.nonneg;
  for (int dim : form.soc_dims) {
    layout.soc_dims.push_back(dim);
    layout.soc_offsets.push_back(off);
    off += dim;
  }

  Matrix P = C.transpose() * C;
  const double sigma = 1e-8 * (P.diagonal().maxCoeff() + 1.0);
  P.diagonal().array() += sigma;
  Eigen::LLT<Matrix> llt(P);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("first order: normal matrix factorization failed");

  const double d_norm = 1.0 + d.lpNorm<Eigen::Infinity>();
  const double c_norm = 1.0 + form.c.lpNorm<Eigen::Infinity>();
  const double relax = 1.6;

  Vector x = Vector::Zero(n);
  Vector s = d;
  project(layout, s);
  Vector u = Vector::Zero(m);
  Vector s_prev = s;
  double rho = 1.0;

  ConeSolution sol;
  sol.status = SolveStatus::max_iter;
  int iter = 0;
  const int check_every = 10;
  for (; iter < config.max_iter; ++iter) {
    x = llt.solve(C.transpose() * (d - s - u) - form.c / rho);
    const Vector Cx = C * x;
    const Vector what = relax * Cx + (1.0 - relax) * (d - s);
    s_prev.swap(s);
    s = d - what - u;
    project(layout, s);
    u += what + s - d;

    if ((iter + 1) % check_every != 0) continue;
    const double pres =
        (Cx + s - d).lpNorm<Eigen::Infinity>() / d_norm;
    const double dres = rho *
        (C.transpose() * (s - s_prev)).lpNorm<Eigen::Infinity>() / c_norm;
    const Vector z = rho * u;
    const double pobj = form.c.dot(x);
    const double dobj = -d.dot(z);
    const double gap = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));
    sol.gap_proxy = gap;
    if (config.verbose && (iter + 1) % 1000 == 0)
      std::fprintf(stderr, "ofo %6d pres %.2e dres %.2e gap %.2e rho %.1e\n",
                   iter + 1, pres, dres, gap, rho);
    if (pres <= config.tol && dres <= config.tol && gap <= config.tol) {
      sol.status = SolveStatus::optimal;
      ++iter;
      break;
    }
    if (!std::isfinite(pres) || x.lpNorm<Eigen::Infinity>() > 1e14) {
      sol.status = SolveStatus::infeasible_suspected;
      ++iter;
      break;
    }
    if ((iter + 1) % 100 == 0) {
      if (pres > 10.0 * dres && rho < 1e6) {
        rho *= 2.0;
        u /= 2.0;
      } else if (dres > 10.0 * pres && rho > 1e-6) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }

  sol.x = x;
  sol.iterations = std::max(iter, 1);
  const auto t_end = std::chrono::steady_clock::now();
  sol.seconds_per_iteration =
      std::chrono::duration<double>(t_end - t_start).count() / sol.iterations;
  return sol;
}

}  // namespace scheds::detail
