#ifndef BEAMSELECT_BARRIER_SOLVER_HPP
#define BEAMSELECT_BARRIER_SOLVER_HPP

#include "beamselect/ipm_solver.hpp"

namespace beamselect {

// Reference backend: a plain two-phase log-barrier path-following method
// on the same inequality-form cone program as solve_cone_program. Slower
// and less accurate than the primal-dual solver; used to cross-check it
// on small programs.
IpmSolution solve_cone_program_barrier(const ConeProgramData& prog,
                                       const IpmOptions& opts = IpmOptions());

}  // namespace beamselect

#endif
