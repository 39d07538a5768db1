#ifndef BEAMSELECT_BASELINES_HPP
#define BEAMSELECT_BASELINES_HPP

#include "beamselect/bnb.hpp"

namespace beamselect {

// Comparison methods: greedy antenna deletion and iteratively reweighted
// convex relaxation. Both return BnbResult-shaped records so the harness
// treats every method uniformly.

// Starting from all antennas, repeatedly solves one restricted problem
// per removal candidate and deletes the antenna whose exclusion has the
// smallest objective, until L antennas remain. Solve count is exactly
// sum_{k=L+1}^{N} k (plus one full solve when N == L).
BnbResult run_greedy(const ProblemInstance& inst,
                     ConicBackend backend = ConicBackend::ipm);

struct IrCvxConfig {
  int reweight_iters = 30;     // inner reweighted loop cap
  int bisection_iters = 30;    // outer lambda bisection steps
  double reweight_tol = 1e-4;  // relative change of the weight vector
  double eps_smooth = 1e-6;    // smoothing constant in 1/(t_n + eps)
  double lambda_init = 1.0;    // first bracket probe
  int growth_steps = 10;       // x10 growths hunting for the upper bracket
  ConicBackend backend = ConicBackend::ipm;

  void validate() const;
};

// Minimizes ||W||_F^2 + lambda sum_n u_n t_n (t_n the row infinity-norm
// epigraph) with weights u_n <- 1/(t_n + eps), bisecting lambda for the
// smallest value yielding <= L surviving rows (row dead when its
// magnitude <= 1e-6 of the largest); the reported solution re-solves the
// restriction to the top-L rows by power.
BnbResult run_ircvxopt(const ProblemInstance& inst,
                       const IrCvxConfig& cfg = IrCvxConfig());

}  // namespace beamselect

#endif
