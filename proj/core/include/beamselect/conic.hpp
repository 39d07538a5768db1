#ifndef BEAMSELECT_CONIC_HPP
#define BEAMSELECT_CONIC_HPP

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "beamselect/instance.hpp"
#include "beamselect/ipm_solver.hpp"

namespace beamselect {

// Continuous subproblems of the joint beamforming / antenna-selection
// search: the SOCP reformulation of the QoS beamforming problem (perfect
// CSI), its S-lemma semidefinite relaxation (robust CSI), and the
// box-relaxed Boolean-row formulation used by the alternative search.

enum class ConicKind { bf_socp, rbf_sdr, z_relaxation };

struct ConicProgram {
  ConicKind kind = ConicKind::bf_socp;
  ConeProgramData data;

  int n = 0;  // full antenna count
  int m = 0;  // users
  std::vector<int> active_rows;    // antennas kept in the variable space
  std::vector<int> excluded_rows;  // antennas forced to zero

  // Variable layout. Beamformer reals live at w_offset: per user,
  // active-row real parts then imaginary parts.
  int w_offset = 0;
  int epi_offset = -1;  // Frobenius-norm epigraph variable (SOCP paths)
  // rbf_sdr: per user n'^2 lifted parameters starting at 0, slacks at
  // slack_offset.
  int slack_offset = -1;
  // z_relaxation: per-antenna variable index, -1 = fixed 0, -2 = fixed 1.
  std::vector<int> z_index;
  double big_c = 0.0;

  // Row-sparsity regularization (iteratively reweighted baseline):
  // epigraph variables for per-row magnitudes, if present.
  int rowreg_offset = -1;

  // Full channel matrix, kept so solutions can be phase-canonicalized
  // (w_m^H h_m rotated to the nonnegative real axis).
  CMatrix channel;
};

struct ConicSolution {
  enum class Status { optimal, infeasible, numerical_error };
  Status status = Status::numerical_error;
  // SOCP paths: ||W||_F^2. SDR path: sum_m Tr(W_m) (the relaxation
  // value; it lower-bounds any rank-one feasible power). +inf when
  // infeasible.
  double objective = std::numeric_limits<double>::infinity();
  BeamformerMatrix w;   // full N x M; excluded rows exactly zero
  RVector row_powers;   // per-antenna ||W(i,:)||^2 (SDR: lifted diagonal)
  double rank_ratio = std::numeric_limits<double>::infinity();
  bool rank_warning = false;  // SDR solution with rank_ratio < 1e4
  RVector z_values;           // z_relaxation only
  std::vector<CMatrix> lifted;  // rbf_sdr only
  RVector row_magnitudes;       // rowreg programs: per-row infinity norms
};

enum class ConicBackend { ipm, barrier };

ConicProgram build_bf_socp(const ProblemInstance& inst,
                           const std::vector<int>& excluded);

ConicProgram build_rbf_sdr(const ProblemInstance& inst,
                           const std::vector<int>& excluded);

// Boolean-row formulation, box relaxed: rows with z fixed to 0 are
// eliminated, rows in `included` have z fixed to 1. big_c bounds row
// norms (|| W(n,:) || <= big_c * z_n).
ConicProgram build_z_relaxation(const ProblemInstance& inst,
                                const std::vector<int>& included,
                                const std::vector<int>& excluded,
                                double big_c);

// min ||W||_F^2 + lambda * sum_n u_n * t_n with t_n >= |W(n,j)| for all j
// (perfect CSI) — the inner subproblem of the reweighted baseline.
ConicProgram build_bf_socp_rowreg(const ProblemInstance& inst, double lambda,
                                  const RVector& weights);

// Robust counterpart: min sum Tr(W_m) + lambda * sum_n u_n * d_n where
// d_n = sum_m W_m(n,n) is the lifted row power (linear, stays an SDP).
ConicProgram build_rbf_sdr_rowreg(const ProblemInstance& inst, double lambda,
                                  const RVector& weights);

ConicSolution solve(const ConicProgram& prog,
                    ConicBackend backend = ConicBackend::ipm);

// Dominant-eigenpair extraction from lifted SDR matrices. Returns the
// rank-one beamformer (full N x M given the active-row list) and the
// minimum over users of lambda_1/lambda_2.
std::pair<BeamformerMatrix, double> extract_rank_one(
    const std::vector<CMatrix>& lifted, const std::vector<int>& active_rows,
    int n_total);

// Sufficient condition for SDR tightness on the antenna subset S:
// ||Pi_m h_m||^2 / eps_m^2 > 1 + M + (M - 1/M) gamma_m for all m, where
// Pi_m projects onto the orthogonal complement of the other users'
// channels restricted to S.
bool check_sdr_tightness(const ProblemInstance& inst,
                         const std::vector<int>& subset,
                         std::string* reason = nullptr);

// Standard-form text dump (objective, constraint triplets, cone list)
// for external cross-validation.
void dump_program(const ConicProgram& prog, std::ostream& os);

}  // namespace beamselect

#endif
