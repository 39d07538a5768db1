#ifndef BEAMSELECT_IPM_SOLVER_HPP
#define BEAMSELECT_IPM_SOLVER_HPP

#include <vector>

#include <Eigen/Dense>

#include "beamselect/cones.hpp"

namespace beamselect {

// Cone linear program in inequality form:
//   minimize    c'x
//   subject to  G x + s = h,  s in K
// with dual
//   maximize    -h'z
//   subject to  G'z + c = 0,  z in K.
struct ConeProgramData {
  Eigen::VectorXd c;
  Eigen::MatrixXd g;
  Eigen::VectorXd h;
  std::vector<ConeSpec> cones;
};

enum class IpmStatus {
  optimal,
  primal_infeasible,
  dual_infeasible,
  max_iterations,
  numerical_error,
};

struct IpmSolution {
  IpmStatus status = IpmStatus::numerical_error;
  Eigen::VectorXd x, s, z;  // z doubles as the infeasibility certificate
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double rel_gap = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  int iterations = 0;
};

struct IpmOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iters = 200;
  double step_fraction = 0.99;
  bool verbose = false;  // per-iteration residual trace to stderr
};

// Homogeneous self-dual embedding with Nesterov-Todd scaled Mehrotra
// predictor-corrector steps. Dense linear algebra throughout (problem
// sizes in this project are a few hundred variables at most).
IpmSolution solve_cone_program(const ConeProgramData& prog,
                               const IpmOptions& opts = IpmOptions());

}  // namespace beamselect

#endif
