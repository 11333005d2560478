#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scheds/cone.hpp"

#include <Eigen/Cholesky>

// Primal-dual interior-point method for
//   min c^T x   s.t.  A x = b,  G x + s = h,  s in K,
// K a product of a nonnegative orthant and second-order cones.  Mehrotra
// predictor-corrector steps with Nesterov-Todd scalings; the KKT system is
// reduced to the normal equations H = G^T W^-2 G with a Schur complement for
// the equality block.

namespace scheds::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SocScaling {
  double eta = 1.0;
  Vector wbar;  // normalized scaling point, wbar^T J wbar = 1
};

struct Scaling {
  Vector lp_w;                    // sqrt(s_i / z_i) per nonneg row
  std::vector<SocScaling> socs;
};

// arrow(u) v with arrow(u) = [u0, ur^T; ur, I + ur ur^T / (1 + u0)]
void arrow_apply(const Vector& u, double* v, int d) {
  const double u0 = u(0);
  double t = 0.0;
  for (int i = 1; i < d; ++i) t += u(i) * v[i];
  const double v0 = v[0];
  v[0] = u0 * v0 + t;
  const double coef = v0 + t / (1.0 + u0);
  for (int i = 1; i < d; ++i) v[i] += coef * u(i);
}

class ConeOps {
 public:
  explicit ConeOps(const StandardForm& form)
      : nonneg_(form.nonneg), dims_(form.soc_dims) {
    offsets_.reserve(dims_.size());
    int off = nonneg_;
    for (int d : dims_) {
      offsets_.push_back(off);
      off += d;
    }
    m_ = off;
  }

  int rows() const { return m_; }
  int degree() const { return nonneg_ + static_cast<int>(dims_.size()); }

  Vector identity() const {
    Vector e = Vector::Zero(m_);
    e.head(nonneg_).setOnes();
    for (std::size_t i = 0; i < dims_.size(); ++i) e(offsets_[i]) = 1.0;
    return e;
  }

  // Smallest cone margin of v (positive iff v is strictly interior).
  double margin(const Vector& v) const {
    double mrg = kInf;
    for (int i = 0; i < nonneg_; ++i) mrg = std::min(mrg, v(i));
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const auto seg = v.segment(offsets_[i], dims_[i]);
      mrg = std::min(mrg, seg(0) - seg.tail(dims_[i] - 1).norm());
    }
    return mrg;
  }

  // CVXOPT-style initialization: shift onto the central ray if needed.
  void push_interior(Vector& v) const {
    const double alpha = -margin(v);
    if (alpha >= 0.0) {
      v.head(nonneg_).array() += 1.0 + alpha;
      for (std::size_t i = 0; i < dims_.size(); ++i)
        v(offsets_[i]) += 1.0 + alpha;
    }
  }

  bool compute_scaling(const Vector& s, const Vector& z, Scaling& w) const {
    w.lp_w.resize(nonneg_);
    for (int i = 0; i < nonneg_; ++i) {
      if (s(i) <= 0.0 || z(i) <= 0.0) return false;
      w.lp_w(i) = std::sqrt(s(i) / z(i));
    }
    w.socs.resize(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const int d = dims_[i];
      const auto sb = s.segment(offsets_[i], d);
      const auto zb = z.segment(offsets_[i], d);
      const double sres = sb(0) * sb(0) - sb.tail(d - 1).squaredNorm();
      const double zres = zb(0) * zb(0) - zb.tail(d - 1).squaredNorm();
      if (sres <= 0.0 || zres <= 0.0 || sb(0) <= 0.0 || zb(0) <= 0.0)
        return false;
      const double snorm = std::sqrt(sres);
      const double znorm = std::sqrt(zres);
      Vector sbar = sb / snorm;
      Vector zbar = zb / znorm;
      const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
      Vector wbar(d);
      wbar(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
      wbar.tail(d - 1) =
          (sbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
      w.socs[i].eta = std::sqrt(snorm / znorm);
      w.socs[i].wbar = std::move(wbar);
    }
    return true;
  }

  // v <- W v  (inverse = true applies W^-1; arrow(J wbar) inverts arrow(wbar))
  void apply_scaling(const Scaling& w, Vector& v, bool inverse) const {
    for (int i = 0; i < nonneg_; ++i)
      v(i) = inverse ? v(i) / w.lp_w(i) : v(i) * w.lp_w(i);
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const int d = dims_[i];
      Vector u = w.socs[i].wbar;
      if (inverse) u.tail(d - 1) = -u.tail(d - 1);
      arrow_apply(u, v.data() + offsets_[i], d);
      const double f = inverse ? 1.0 / w.socs[i].eta : w.socs[i].eta;
      v.segment(offsets_[i], d) *= f;
    }
  }

  // Column-block application of W^-1 to G, giving M with M^T M = G^T W^-2 G.
  void scale_rows_inv(const Scaling& w, const Matrix& G, Matrix& M) const {
    M = G;
    for (int i = 0; i < nonneg_; ++i) M.row(i) /= w.lp_w(i);
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const int d = dims_[i];
      const auto& sc = w.socs[i];
      auto B = M.middleRows(offsets_[i], d);
      Eigen::RowVectorXd t =
          sc.wbar.tail(d - 1).transpose() * B.bottomRows(d - 1);
      Eigen::RowVectorXd top = B.row(0);
      B.row(0) = sc.wbar(0) * top - t;
      Eigen::RowVectorXd coef = top - t / (1.0 + sc.wbar(0));
      B.bottomRows(d - 1).noalias() -= sc.wbar.tail(d - 1) * coef;
      B /= sc.eta;
    }
  }

  Vector jordan_product(const Vector& u, const Vector& v) const {
    Vector out(m_);
    out.head(nonneg_) = u.head(nonneg_).cwiseProduct(v.head(nonneg_));
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const int d = dims_[i];
      const auto ub = u.segment(offsets_[i], d);
      const auto vb = v.segment(offsets_[i], d);
      out(offsets_[i]) = ub.dot(vb);
      out.segment(offsets_[i] + 1, d - 1) =
          ub(0) * vb.tail(d - 1) + vb(0) * ub.tail(d - 1);
    }
    return out;
  }

  // Solve lambda o x = dvec blockwise.
  Vector jordan_div(const Vector& lambda, const Vector& dvec) const {
    Vector out(m_);
    out.head(nonneg_) = dvec.head(nonneg_).cwiseQuotient(lambda.head(nonneg_));
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const int d = dims_[i];
      const auto lb = lambda.segment(offsets_[i], d);
      const auto db = dvec.segment(offsets_[i], d);
      const double det = lb(0) * lb(0) - lb.tail(d - 1).squaredNorm();
      const double x0 = (lb(0) * db(0) - lb.tail(d - 1).dot(db.tail(d - 1))) / det;
      out(offsets_[i]) = x0;
      out.segment(offsets_[i] + 1, d - 1) =
          (db.tail(d - 1) - x0 * lb.tail(d - 1)) / lb(0);
    }
    return out;
  }

  // Largest step with v + alpha dv in the cone (capped by the caller).
  double max_step(const Vector& v, const Vector& dv) const {
    double alpha = kInf;
    for (int i = 0; i < nonneg_; ++i)
      if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const int d = dims_[i];
      const auto vb = v.segment(offsets_[i], d);
      const auto db = dv.segment(offsets_[i], d);
      if (db(0) < 0.0) alpha = std::min(alpha, -vb(0) / db(0));
      const double c2 = db(0) * db(0) - db.tail(d - 1).squaredNorm();
      const double c1 =
          2.0 * (vb(0) * db(0) - vb.tail(d - 1).dot(db.tail(d - 1)));
      const double c0 = vb(0) * vb(0) - vb.tail(d - 1).squaredNorm();
      if (std::abs(c2) < 1e-300) {
        if (c1 < 0.0) alpha = std::min(alpha, -c0 / c1);
        continue;
      }
      const double disc = c1 * c1 - 4.0 * c2 * c0;
      if (disc < 0.0) continue;  // no boundary crossing
      const double sq = std::sqrt(disc);
      const double r1 = (-c1 - sq) / (2.0 * c2);
      const double r2 = (-c1 + sq) / (2.0 * c2);
      const double lo = std::min(r1, r2);
      const double hi = std::max(r1, r2);
      if (lo > 0.0)
        alpha = std::min(alpha, lo);
      else if (hi > 0.0 && c2 < 0.0)
        alpha = std::min(alpha, hi);
    }
    return alpha;
  }

 private:
  int nonneg_;
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int m_ = 0;
};

// Factorization of [H A^T; A 0] with H = M^T M + delta I via Schur complement.
class KktSolver {
 public:
  void factor(const Matrix& M, const Matrix& A) {
    const int n = static_cast<int>(M.cols());
    H_.setZero(n, n);
    H_.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
    const double delta = 1e-12 * (H_.diagonal().maxCoeff() + 1.0);
    H_.diagonal().array() += delta;
    llt_.compute(H_.selfadjointView<Eigen::Lower>());
    if (llt_.info() != Eigen::Success) {
      H_.diagonal().array() += 1e6 * delta;
      llt_.compute(H_.selfadjointView<Eigen::Lower>());
      if (llt_.info() != Eigen::Success)
        throw std::runtime_error("kkt factorization breakdown");
    }
    me_ = static_cast<int>(A.rows());
    if (me_ > 0) {
      HinvAt_ = llt_.solve(A.transpose());
      Matrix S = A * HinvAt_;
      S.diagonal().array() += 1e-12 * (S.diagonal().cwiseAbs().maxCoeff() + 1.0);
      schur_.compute(S);
      if (schur_.info() != Eigen::Success)
        throw std::runtime_error("schur factorization breakdown");
    }
  }

  // Solves H dx + A^T dy = rx, A dx = ry.
  void solve(const Matrix& A, const Vector& rx, const Vector& ry, Vector& dx,
             Vector& dy) const {
    Vector t = llt_.solve(rx);
    if (me_ > 0) {
      dy = schur_.solve(A * t - ry);
      dx = t - HinvAt_ * dy;
    } else {
      dy.resize(0);
      dx = std::move(t);
    }
  }

 private:
  Matrix H_;
  Matrix HinvAt_;
  Eigen::LLT<Matrix, Eigen::Lower> llt_;
  Eigen::LDLT<Matrix> schur_;
  int me_ = 0;
};

}  // namespace

ConeSolution solve_interior_point(const StandardForm& form,
                                  const SolverConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = form.n;
  const int m = form.cone_rows();
  const int me = form.eq_rows();
  if (m == 0)
    throw std::invalid_argument(
        "interior point: program has no inequality or cone constraints");

  const ConeOps cone(form);
  const double degree = cone.degree();
  const Matrix& G = form.G;
  const Matrix& A = form.A;

  ConeSolution sol;
  sol.x = Vector::Zero(n);
  sol.status = SolveStatus::max_iter;

  // Initial point: least-squares primal/dual with unit scaling.
  Vector x(n), y(me), s(m), z(m);
  {
    KktSolver kkt0;
    kkt0.factor(G, A);
    Vector dy;
    kkt0.solve(A, G.transpose() * form.h, form.b, x, dy);
    s = form.h - G * x;
    cone.push_interior(s);
    Vector w;
    kkt0.solve(A, form.c, Vector::Zero(me), w, dy);
    z = -(G * w);
    cone.push_interior(z);
    y = me > 0 ? Vector(-dy) : Vector(0);
  }

  const double h_norm = 1.0 + form.h.lpNorm<Eigen::Infinity>();
  const double b_norm = 1.0 + (me > 0 ? form.b.lpNorm<Eigen::Infinity>() : 0.0);
  const double c_norm = 1.0 + form.c.lpNorm<Eigen::Infinity>();
  const Vector e = cone.identity();

  Scaling w;
  Matrix M;
  KktSolver kkt;
  Vector dx(n), dy(me), ds(m), dz(m);
  int iter = 0;
  for (; iter < config.max_iter; ++iter) {
    const Vector r_d = form.c + (me > 0 ? Vector(A.transpose() * y) : Vector::Zero(n)) +
                       G.transpose() * z;
    const Vector r_p = G * x + s - form.h;
    const Vector r_e = me > 0 ? Vector(A * x - form.b) : Vector(0);
    const double gap = s.dot(z);
    const double mu = gap / degree;
    const double pobj = form.c.dot(x);

    const double pres =
        std::max(r_p.lpNorm<Eigen::Infinity>() / h_norm,
                 me > 0 ? r_e.lpNorm<Eigen::Infinity>() / b_norm : 0.0);
    const double dres = r_d.lpNorm<Eigen::Infinity>() / c_norm;
    const double relgap = gap / std::max(1.0, std::abs(pobj));
    sol.gap_proxy = relgap;

    if (config.verbose) {
      std::fprintf(stderr, "ip %3d  pres %.2e dres %.2e gap %.2e obj % .8e\n",
                   iter, pres, dres, relgap, pobj);
    }
    if (pres <= config.tol && dres <= config.tol && relgap <= config.tol) {
      sol.status = SolveStatus::optimal;
      break;
    }
    const double iterate_scale =
        std::max({x.lpNorm<Eigen::Infinity>(), s.lpNorm<Eigen::Infinity>(),
                  z.lpNorm<Eigen::Infinity>()});
    if (!std::isfinite(gap) || iterate_scale > 1e14) {
      sol.status = SolveStatus::infeasible_suspected;
      break;
    }

    if (!cone.compute_scaling(s, z, w)) {
      sol.status = SolveStatus::infeasible_suspected;
      break;
    }
    Vector lambda = z;
    cone.apply_scaling(w, lambda, false);

    cone.scale_rows_inv(w, G, M);
    try {
      kkt.factor(M, A);
    } catch (const std::runtime_error&) {
      sol.status = SolveStatus::infeasible_suspected;
      break;
    }

    const auto newton = [&](const Vector& dlambda) {
      const Vector dsigma = cone.jordan_div(lambda, dlambda);
      Vector t = r_p;
      cone.apply_scaling(w, t, true);
      t += dsigma;
      cone.apply_scaling(w, t, true);
      const Vector rhs_x = -r_d - G.transpose() * t;
      kkt.solve(A, rhs_x, -r_e, dx, dy);
      ds = -r_p - G * dx;
      Vector u = ds;
      cone.apply_scaling(w, u, true);
      dz = dsigma - u;
      cone.apply_scaling(w, dz, true);
    };

    // Predictor.
    newton(-cone.jordan_product(lambda, lambda));
    const double alpha_aff =
        std::min({cone.max_step(s, ds), cone.max_step(z, dz), 1.0});
    const double mu_aff =
        (s + alpha_aff * ds).dot(z + alpha_aff * dz) / degree;
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::min(1.0, std::max(0.0, sigma));

    // Corrector.
    Vector ws = ds, wz = dz;
    cone.apply_scaling(w, ws, true);
    cone.apply_scaling(w, wz, false);
    const Vector dlambda = -cone.jordan_product(lambda, lambda) -
                           cone.jordan_product(ws, wz) + sigma * mu * e;
    newton(dlambda);

    double alpha =
        0.99 * std::min(cone.max_step(s, ds), cone.max_step(z, dz));
    alpha = std::min(alpha, 1.0);
    if (!(alpha > 1e-13)) {
      sol.status = SolveStatus::infeasible_suspected;
      break;
    }
    x += alpha * dx;
    if (me > 0) y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
  }

  sol.x = x;
  sol.iterations = std::max(iter, 1);
  const auto t_end = std::chrono::steady_clock::now();
  sol.seconds_per_iteration =
      std::chrono::duration<double>(t_end - t_start).count() / sol.iterations;
  return sol;
}

}  // namespace scheds::detail
