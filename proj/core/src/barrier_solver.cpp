#include "beamselect/barrier_solver.hpp"

#include <cmath>

namespace beamselect {

namespace {

double barrier_value(const std::vector<ConeSpec>& cones,
                     const Eigen::VectorXd& s) {
  double f = 0.0;
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        f -= s.segment(off, c.dim).array().log().sum();
        break;
      case ConeKind::soc: {
        double j = s(off) * s(off) - s.segment(off + 1, c.dim - 1).squaredNorm();
        f -= std::log(j);
        break;
      }
      case ConeKind::psd: {
        Eigen::LLT<Eigen::MatrixXd> llt(smat(s.segment(off, c.vec_dim())));
        f -= 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        break;
      }
    }
    off += c.vec_dim();
  }
  return f;
}

Eigen::VectorXd barrier_gradient(const std::vector<ConeSpec>& cones,
                                 const Eigen::VectorXd& s) {
  Eigen::VectorXd g(s.size());
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        g.segment(off, c.dim) = -s.segment(off, c.dim).cwiseInverse();
        break;
      case ConeKind::soc: {
        const int k = c.dim - 1;
        double j = s(off) * s(off) - s.segment(off + 1, k).squaredNorm();
        g(off) = -2.0 * s(off) / j;
        g.segment(off + 1, k) = 2.0 * s.segment(off + 1, k) / j;
        break;
      }
      case ConeKind::psd: {
        Eigen::MatrixXd inv =
            smat(s.segment(off, c.vec_dim())).inverse();
        g.segment(off, c.vec_dim()) = -svec(inv);
        break;
      }
    }
    off += c.vec_dim();
  }
  return g;
}

// Returns H * M where H is the barrier Hessian at s.
Eigen::MatrixXd barrier_hessian_times(const std::vector<ConeSpec>& cones,
                                      const Eigen::VectorXd& s,
                                      const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  int off = 0;
  for (const auto& c : cones) {
    const int d = c.vec_dim();
    switch (c.kind) {
      case ConeKind::nonneg: {
        Eigen::VectorXd w = s.segment(off, d).array().square().inverse();
        out.middleRows(off, d) = w.asDiagonal() * m.middleRows(off, d);
        break;
      }
      case ConeKind::soc: {
        const int k = c.dim - 1;
        double j = s(off) * s(off) - s.segment(off + 1, k).squaredNorm();
        Eigen::VectorXd js(d);
        js(0) = s(off);
        js.tail(k) = -s.segment(off + 1, k);
        for (int col = 0; col < m.cols(); ++col) {
          auto v = m.block(off, col, d, 1);
          Eigen::VectorXd jv(d);
          jv(0) = v(0, 0);
          jv.tail(k) = -v.col(0).tail(k);
          out.block(off, col, d, 1) =
              (4.0 / (j * j)) * js * js.dot(v.col(0)) - (2.0 / j) * jv;
        }
        break;
      }
      case ConeKind::psd: {
        Eigen::MatrixXd inv = smat(s.segment(off, d)).inverse();
        for (int col = 0; col < m.cols(); ++col) {
          Eigen::MatrixXd vm = smat(m.block(off, col, d, 1).col(0));
          out.block(off, col, d, 1) = svec(inv * vm * inv);
        }
        break;
      }
    }
    off += d;
  }
  return out;
}

// Minimizes t*c'x + F(h - Gx) with Newton + backtracking from a strictly
// feasible x. Returns false on a numerical breakdown.
bool newton_centering(const Eigen::VectorXd& c, const Eigen::MatrixXd& g,
                      const Eigen::VectorXd& h,
                      const std::vector<ConeSpec>& cones, double t,
                      Eigen::VectorXd& x, int max_newton = 80) {
  for (int it = 0; it < max_newton; ++it) {
    Eigen::VectorXd s = h - g * x;
    Eigen::VectorXd grad = t * c - g.transpose() * barrier_gradient(cones, s);
    Eigen::MatrixXd hg = barrier_hessian_times(cones, s, g);
    Eigen::MatrixXd hess = g.transpose() * hg;
    // Ridge keeps the factorization sound when the barrier Hessian is
    // rank-deficient along directions the constraints do not see.
    const double ridge =
        1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    hess.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success) return false;
    Eigen::VectorXd dx = -ldlt.solve(grad);
    double decrement = -grad.dot(dx);
    if (!(decrement > 0)) return true;  // at (numerical) optimum
    if (decrement < 1e-10) return true;
    double f0 = t * c.dot(x) + barrier_value(cones, s);
    double alpha = 1.0;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd xn = x + alpha * dx;
      Eigen::VectorXd sn = h - g * xn;
      if (in_cone_interior(cones, sn, 0.0)) {
        double fn = t * c.dot(xn) + barrier_value(cones, sn);
        if (fn <= f0 - 1e-4 * alpha * decrement) {
          x = xn;
          break;
        }
      }
      alpha *= 0.5;
      if (bt == 59) return true;  // cannot progress further
    }
  }
  return true;
}

// Margin needed to push v into the cone interior along the identity.
double interiority_deficit(const std::vector<ConeSpec>& cones,
                           const Eigen::VectorXd& v) {
  double u = 0.0;
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        u = std::max(u, -v.segment(off, c.dim).minCoeff());
        break;
      case ConeKind::soc:
        u = std::max(u, v.segment(off + 1, c.dim - 1).norm() - v(off));
        break;
      case ConeKind::psd: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            smat(v.segment(off, c.vec_dim())), Eigen::EigenvaluesOnly);
        u = std::max(u, -es.eigenvalues().minCoeff());
        break;
      }
    }
    off += c.vec_dim();
  }
  return u;
}

}  // namespace

IpmSolution solve_cone_program_barrier(const ConeProgramData& prog,
                                       const IpmOptions& opts) {
  IpmSolution sol;
  const int n = static_cast<int>(prog.c.size());
  const double deg = total_degree(prog.cones);
  const Eigen::VectorXd e = cone_identity(prog.cones);

  // Phase I: minimize u subject to h - Gx + u*e interior.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  double u = interiority_deficit(prog.cones, prog.h) + 1.0;
  {
    Eigen::MatrixXd g1(prog.g.rows(), n + 1);
    g1.leftCols(n) = prog.g;
    g1.col(n) = -e;
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + 1);
    c1(n) = 1.0;
    Eigen::VectorXd xu(n + 1);
    xu.head(n) = x;
    xu(n) = u;
    for (double t = 1.0; deg / t > 1e-9; t *= 10.0) {
      if (!newton_centering(c1, g1, prog.h, prog.cones, t, xu)) break;
      if (xu(n) < -1e-6) break;  // strictly feasible point found
    }
    x = xu.head(n);
    u = xu(n);
    if (u >= -1e-9) {
      // No strictly feasible point located: declare infeasible if the
      // phase-I optimum is clearly positive, else give up.
      sol.status = (u > 1e-7) ? IpmStatus::primal_infeasible
                              : IpmStatus::numerical_error;
      return sol;
    }
  }

  // Phase II: path-following on the true objective.
  double t_final = 1.0;
  for (double t = 1.0; deg / t > opts.tol_gap * 10; t *= 10.0) {
    if (!newton_centering(prog.c, prog.g, prog.h, prog.cones, t, x)) {
      sol.status = IpmStatus::numerical_error;
      return sol;
    }
    t_final = t;
  }

  sol.x = x;
  sol.s = prog.h - prog.g * x;
  sol.z = -barrier_gradient(prog.cones, sol.s) / t_final;
  sol.primal_obj = prog.c.dot(x);
  sol.dual_obj = -prog.h.dot(sol.z);
  sol.rel_gap = deg / t_final / std::max(1.0, std::abs(sol.primal_obj));
  sol.pres = 0.0;
  sol.dres = (prog.g.transpose() * sol.z + prog.c).norm() /
             std::max(1.0, prog.c.norm());
  sol.status = IpmStatus::optimal;
  return sol;
}

}  // namespace beamselect
