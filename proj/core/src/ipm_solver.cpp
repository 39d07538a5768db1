#include "beamselect/ipm_solver.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

namespace beamselect {

namespace {

// Solves the scaled KKT pair
//   G' u_z             = a
//   G u_x - W'W u_z    = b
// via the normal equations (W^{-T}G)'(W^{-T}G) u_x = a + G'(W'W)^{-1} b.
struct KktSolver {
  const Eigen::MatrixXd& g;
  Eigen::MatrixXd g_scaled;  // W^{-T} G
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  const NTScaling& w;

  KktSolver(const Eigen::MatrixXd& g_in, const NTScaling& w_in)
      : g(g_in), w(w_in) {
    g_scaled = w.apply_inv_transpose_matrix(g);
    ldlt.compute(g_scaled.transpose() * g_scaled);
  }

  bool ok() const { return ldlt.info() == Eigen::Success; }

  void solve_once(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                  Eigen::VectorXd& ux, Eigen::VectorXd& uz) const {
    Eigen::VectorXd wb = w.apply_inv_transpose(b);
    ux = ldlt.solve(a + g_scaled.transpose() * wb);
    uz = w.apply_inv(g_scaled * ux - wb);
  }

  void solve(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
             Eigen::VectorXd& ux, Eigen::VectorXd& uz) const {
    solve_once(a, b, ux, uz);
    // One step of iterative refinement; the normal equations lose digits
    // as the central path parameter shrinks.
    Eigen::VectorXd ra = a - g.transpose() * uz;
    Eigen::VectorXd rb = b - (g * ux - w.apply_transpose(w.apply(uz)));
    Eigen::VectorXd cx, cz;
    solve_once(ra, rb, cx, cz);
    ux += cx;
    uz += cz;
  }
};

}  // namespace

IpmSolution solve_cone_program(const ConeProgramData& prog,
                               const IpmOptions& opts) {
  const int n = static_cast<int>(prog.c.size());
  const int m = total_vec_dim(prog.cones);
  IpmSolution sol;
  if (prog.g.rows() != m || prog.g.cols() != n || prog.h.size() != m) {
    sol.status = IpmStatus::numerical_error;
    return sol;
  }

  const Eigen::VectorXd e = cone_identity(prog.cones);
  const double deg = total_degree(prog.cones);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s = e, z = e;
  double tau = 1.0, kappa = 1.0;

  const double hnorm = std::max(1.0, prog.h.norm());
  const double cnorm = std::max(1.0, prog.c.norm());

  auto finish_optimal = [&](IpmSolution& out) {
    out.x = x / tau;
    out.s = s / tau;
    out.z = z / tau;
    out.primal_obj = prog.c.dot(out.x);
    out.dual_obj = -prog.h.dot(out.z);
    out.status = IpmStatus::optimal;
  };

  // Snapshot of the best iterate seen, by worst-case residual; the
  // iteration can deteriorate once the gap reaches machine precision.
  double best_err = std::numeric_limits<double>::infinity();
  Eigen::VectorXd bx = x, bs = s, bz = z;
  double btau = tau, bkappa = kappa;
  auto fallback = [&](IpmSolution& out) {
    x = bx;
    s = bs;
    z = bz;
    tau = btau;
    kappa = bkappa;
    finish_optimal(out);
    out.pres = (prog.g * out.x + out.s - prog.h).norm() / hnorm;
    out.dres = (prog.g.transpose() * out.z + prog.c).norm() / cnorm;
    out.rel_gap =
        out.s.dot(out.z) / std::max(1.0, std::abs(out.primal_obj));
    out.status =
        best_err <= 1e-7 ? IpmStatus::optimal : IpmStatus::numerical_error;
  };

  for (int it = 0; it < opts.max_iters; ++it) {
    sol.iterations = it;

    // Residuals of the homogeneous embedding.
    Eigen::VectorXd rx = prog.g.transpose() * z + prog.c * tau;
    Eigen::VectorXd rz = s + prog.g * x - prog.h * tau;
    double rtau = kappa + prog.c.dot(x) + prog.h.dot(z);
    double mu = (s.dot(z) + tau * kappa) / (deg + 1.0);

    // Convergence / certificate checks on the de-homogenized point.
    double pres = (prog.g * (x / tau) + s / tau - prog.h).norm() / hnorm;
    double dres = (prog.g.transpose() * (z / tau) + prog.c).norm() / cnorm;
    double pcost = prog.c.dot(x) / tau;
    double gap = s.dot(z) / (tau * tau);
    double relgap = gap / std::max(1.0, std::abs(pcost));
    sol.pres = pres;
    sol.dres = dres;
    sol.rel_gap = relgap;
    if (opts.verbose)
      std::fprintf(stderr,
                   "it=%3d pres=%9.2e dres=%9.2e relgap=%9.2e mu=%9.2e "
                   "tau=%9.2e kappa=%9.2e\n",
                   it, pres, dres, relgap, mu, tau, kappa);
    double err = std::max({pres, dres, relgap});
    if (err < best_err) {
      best_err = err;
      bx = x;
      bs = s;
      bz = z;
      btau = tau;
      bkappa = kappa;
    }
    if (pres <= opts.tol_feas && dres <= opts.tol_feas &&
        relgap <= opts.tol_gap) {
      finish_optimal(sol);
      return sol;
    }
    // Stalled at numerical precision: settle for the best point seen.
    if (err > 100.0 * best_err && best_err <= 1e-7) {
      fallback(sol);
      return sol;
    }
    double hz = prog.h.dot(z);
    if (hz < 0 &&
        (prog.g.transpose() * z).norm() <= opts.tol_feas * cnorm * (-hz)) {
      sol.status = IpmStatus::primal_infeasible;
      sol.z = z / (-hz);
      return sol;
    }
    double cx = prog.c.dot(x);
    if (cx < 0 && (prog.g * x + s).norm() <= opts.tol_feas * hnorm * (-cx)) {
      sol.status = IpmStatus::dual_infeasible;
      sol.x = x / (-cx);
      sol.s = s / (-cx);
      return sol;
    }

    std::optional<NTScaling> w;
    try {
      w.emplace(prog.cones, s, z);
    } catch (const std::exception&) {
      fallback(sol);
      return sol;
    }
    KktSolver kkt(prog.g, *w);
    if (!kkt.ok()) {
      fallback(sol);
      return sol;
    }
    const Eigen::VectorXd& lambda = w->lambda();
    Eigen::VectorXd lam_sq = jordan_product(prog.cones, lambda, lambda);

    // Constant part of the two-solve decomposition.
    Eigen::VectorXd x1, z1;
    kkt.solve(-prog.c, prog.h, x1, z1);
    double denom = prog.c.dot(x1) + prog.h.dot(z1) - kappa / tau;

    auto direction = [&](double sigma, double eta,
                         const Eigen::VectorXd& corr, double corr_kt,
                         Eigen::VectorXd& dx, Eigen::VectorXd& ds,
                         Eigen::VectorXd& dz, double& dtau, double& dkappa) {
      Eigen::VectorXd comp = sigma * mu * e - lam_sq - corr;
      Eigen::VectorXd ds_rhs = jordan_solve(prog.cones, lambda, comp);
      double dkt = sigma * mu - tau * kappa - corr_kt;
      Eigen::VectorXd x2, z2;
      kkt.solve(-eta * rx, -eta * rz - w->apply_transpose(ds_rhs), x2, z2);
      dtau = (-eta * rtau - prog.c.dot(x2) - prog.h.dot(z2) - dkt / tau) /
             denom;
      dx = x2 + dtau * x1;
      dz = z2 + dtau * z1;
      ds = w->apply_transpose(ds_rhs - w->apply(dz));
      dkappa = (dkt - kappa * dtau) / tau;
    };

    auto max_step = [&](const Eigen::VectorXd& ds, const Eigen::VectorXd& dz,
                        double dtau, double dkappa) {
      double a = step_to_boundary(prog.cones, s, ds);
      a = std::min(a, step_to_boundary(prog.cones, z, dz));
      if (dtau < 0) a = std::min(a, -tau / dtau);
      if (dkappa < 0) a = std::min(a, -kappa / dkappa);
      return a;
    };

    // Predictor.
    Eigen::VectorXd dx_a, ds_a, dz_a, zero_corr = Eigen::VectorXd::Zero(m);
    double dtau_a, dkappa_a;
    direction(0.0, 1.0, zero_corr, 0.0, dx_a, ds_a, dz_a, dtau_a, dkappa_a);
    double alpha_aff = std::min(1.0, max_step(ds_a, dz_a, dtau_a, dkappa_a));
    double sigma = std::pow(1.0 - alpha_aff, 3);
    sigma = std::min(1.0, std::max(0.0, sigma));

    // Corrector (Mehrotra second-order term in the scaled space).
    Eigen::VectorXd corr = jordan_product(
        prog.cones, w->apply_inv_transpose(ds_a), w->apply(dz_a));
    double corr_kt = dtau_a * dkappa_a;

    Eigen::VectorXd dx, ds, dz;
    double dtau, dkappa;
    direction(sigma, 1.0 - sigma, corr, corr_kt, dx, ds, dz, dtau, dkappa);
    double alpha =
        std::min(1.0, opts.step_fraction * max_step(ds, dz, dtau, dkappa));
    if (!std::isfinite(alpha) || alpha <= 0) {
      fallback(sol);
      return sol;
    }

    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    if (tau <= 0 || kappa <= 0 || !std::isfinite(mu)) {
      fallback(sol);
      return sol;
    }
  }

  // Accept the best iterate if it is loosely converged, else report the
  // iteration cap.
  fallback(sol);
  if (sol.status != IpmStatus::optimal) sol.status = IpmStatus::max_iterations;
  return sol;
}

}  // namespace beamselect
