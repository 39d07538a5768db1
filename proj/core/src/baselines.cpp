#include "beamselect/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "beamselect/conic.hpp"

namespace beamselect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Restricted QoS solve with backend retry; every call counts.
ConicSolution solve_restricted(const ProblemInstance& inst,
                               const std::vector<int>& excluded,
                               ConicBackend backend, long& solve_count) {
  ConicProgram prog = inst.config.csi_mode == CsiMode::robust
                          ? build_rbf_sdr(inst, excluded)
                          : build_bf_socp(inst, excluded);
  ConicSolution sol = solve(prog, backend);
  if (sol.status == ConicSolution::Status::numerical_error)
    sol = solve(prog, backend == ConicBackend::ipm ? ConicBackend::barrier
                                                   : ConicBackend::ipm);
  ++solve_count;
  if (sol.status == ConicSolution::Status::numerical_error)
    throw SolverError("conic backend failed in baseline restricted solve");
  return sol;
}

std::vector<int> complement_of(int n, const std::vector<int>& keep) {
  std::vector<bool> in(n, false);
  for (int i : keep) in[i] = true;
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

}  // namespace

BnbResult run_greedy(const ProblemInstance& inst, ConicBackend backend) {
  inst.config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const int n = inst.n();
  const int l = inst.l();
  BnbResult res;
  res.status = BnbResult::Status::infeasible;

  std::vector<int> keep(n);
  std::iota(keep.begin(), keep.end(), 0);

  ConicSolution best;
  if (n == l) {
    best = solve_restricted(inst, {}, backend, res.conic_solve_count);
    if (best.status != ConicSolution::Status::optimal) return res;
  }
  while (static_cast<int>(keep.size()) > l) {
    int winner = -1;
    ConicSolution winner_sol;
    for (int cand : keep) {
      std::vector<int> trial;
      for (int a : keep)
        if (a != cand) trial.push_back(a);
      ConicSolution sol = solve_restricted(inst, complement_of(n, trial),
                                           backend, res.conic_solve_count);
      ++res.nodes_visited;
      if (sol.status == ConicSolution::Status::optimal &&
          (winner < 0 || sol.objective < winner_sol.objective)) {
        winner = cand;
        winner_sol = std::move(sol);
      }
    }
    if (winner < 0) {
      res.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
      return res;  // every deletion infeasible at this stage
    }
    keep.erase(std::find(keep.begin(), keep.end(), winner));
    best = std::move(winner_sol);
    res.bound_trace.push_back({best.objective, best.objective});
  }

  res.status = BnbResult::Status::optimal;
  res.objective = best.objective;
  res.w_star = BeamformerMatrix::from_dense(best.w.w, 0.0);
  res.a_star = keep;
  res.rank_warning = best.rank_warning;
  res.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();
  return res;
}

void IrCvxConfig::validate() const {
  if (reweight_iters <= 0 || bisection_iters <= 0 || growth_steps <= 0)
    throw ConfigError("ircvx config: iteration counts must be positive");
  if (!(reweight_tol > 0) || !(eps_smooth > 0) || !(lambda_init > 0))
    throw ConfigError("ircvx config: tolerances must be positive");
}

namespace {

struct ReweightOutcome {
  bool solved = false;
  int nonzero_rows = 0;
  RVector magnitudes;  // per-row size measure used for support decisions
};

// Inner loop: iteratively reweighted row-sparsity solve at fixed lambda.
ReweightOutcome reweighted_solve(const ProblemInstance& inst, double lambda,
                                 const IrCvxConfig& cfg, long& solve_count) {
  const int n = inst.n();
  const bool robust = inst.config.csi_mode == CsiMode::robust;
  RVector weights = RVector::Ones(n);
  ReweightOutcome out;
  for (int it = 0; it < cfg.reweight_iters; ++it) {
    ConicProgram prog = robust
                            ? build_rbf_sdr_rowreg(inst, lambda, weights)
                            : build_bf_socp_rowreg(inst, lambda, weights);
    ConicSolution sol = solve(prog, cfg.backend);
    if (sol.status == ConicSolution::Status::numerical_error)
      sol = solve(prog, cfg.backend == ConicBackend::ipm
                            ? ConicBackend::barrier
                            : ConicBackend::ipm);
    ++solve_count;
    if (sol.status != ConicSolution::Status::optimal) return out;

    RVector mags = robust ? sol.row_powers.cwiseMax(0.0).cwiseSqrt().eval()
                          : sol.row_magnitudes;
    const double top = mags.maxCoeff();
    int alive = 0;
    for (int i = 0; i < n; ++i)
      if (mags(i) > 1e-6 * top) ++alive;

    out.solved = true;
    out.nonzero_rows = alive;
    out.magnitudes = mags;
    if (alive <= inst.l()) return out;

    RVector next(n);
    for (int i = 0; i < n; ++i) next(i) = 1.0 / (mags(i) + cfg.eps_smooth);
    const double change =
        (next - weights).norm() / std::max(1.0, weights.norm());
    weights = next;
    if (change < cfg.reweight_tol) return out;
  }
  return out;
}

}  // namespace

BnbResult run_ircvxopt(const ProblemInstance& inst, const IrCvxConfig& cfg) {
  inst.config.validate();
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const int n = inst.n();
  const int l = inst.l();
  BnbResult res;
  res.status = BnbResult::Status::infeasible;

  // Bracket: grow lambda x10 until the reweighted solution is L-sparse.
  double lo = 0.0, hi = cfg.lambda_init;
  ReweightOutcome sparse;
  for (int g = 0; g <= cfg.growth_steps; ++g) {
    ReweightOutcome out = reweighted_solve(inst, hi, cfg, res.conic_solve_count);
    if (out.solved && out.nonzero_rows <= l) {
      sparse = std::move(out);
      break;
    }
    lo = hi;
    hi *= 10.0;
  }

  // Bisect for the smallest lambda keeping <= L rows; remember the
  // sparsest outcome seen in case the bracket never resolved.
  ReweightOutcome fallback = sparse;
  if (sparse.solved) {
    for (int b = 0; b < cfg.bisection_iters; ++b) {
      const double mid = 0.5 * (lo + hi);
      ReweightOutcome out =
          reweighted_solve(inst, mid, cfg, res.conic_solve_count);
      if (out.solved && out.nonzero_rows <= l) {
        hi = mid;
        sparse = std::move(out);
      } else {
        lo = mid;
      }
    }
  } else {
    // Bracket search failed to reach L-sparsity; fall back to the
    // largest-lambda solve and truncate its support below.
    fallback = reweighted_solve(inst, hi, cfg, res.conic_solve_count);
    if (!fallback.solved) {
      res.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
      return res;
    }
    sparse = std::move(fallback);
  }

  // Keep the top-L rows by magnitude and re-solve the restriction.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sparse.magnitudes(a) > sparse.magnitudes(b);
  });
  std::vector<int> keep(order.begin(), order.begin() + l);
  std::sort(keep.begin(), keep.end());
  ConicSolution final_sol = solve_restricted(inst, complement_of(n, keep),
                                             cfg.backend,
                                             res.conic_solve_count);
  res.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();
  if (final_sol.status != ConicSolution::Status::optimal) return res;

  res.status = BnbResult::Status::optimal;
  res.objective = final_sol.objective;
  res.w_star = BeamformerMatrix::from_dense(final_sol.w.w, 0.0);
  res.a_star = keep;
  res.rank_warning = final_sol.rank_warning;
  res.bound_trace.push_back({res.objective, res.objective});
  (void)kInf;
  return res;
}

}  // namespace beamselect
