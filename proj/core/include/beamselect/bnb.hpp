#ifndef BEAMSELECT_BNB_HPP
#define BEAMSELECT_BNB_HPP

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "beamselect/conic.hpp"
#include "beamselect/instance.hpp"

namespace beamselect {

// Exact branch-and-bound over antenna subsets: each node fixes a set of
// antennas on (include_set) and off (exclude_set); the node relaxation
// drops the cardinality constraint and zeroes the excluded rows.

struct NodeState {
  std::vector<int> include_set;  // sorted
  std::vector<int> exclude_set;  // sorted
  int level = 0;
  int id = 0;
  int parent = -1;
  bool is_leaf = false;

  double lb = std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  CMatrix w_lb;                 // relaxation solution; empty if infeasible
  RVector row_powers_lb;        // per-antenna power of the relaxation
  CMatrix w_ub;                 // restricted solution behind ub
  std::vector<int> ub_support;  // the N-L antennas excluded by the ub solve

  bool decided(int antenna) const;
  std::vector<int> undecided(int n) const;
};

enum class BnbFormulation { direct, z_aux };

struct BnbConfig {
  double rel_gap = 1e-4;
  long max_nodes = 0;  // 0 = no cap
  BnbFormulation formulation = BnbFormulation::direct;
  bool reuse_right_child = true;
  double big_c = 0.0;  // z_aux row-norm bound; <= 0 selects automatically
  ConicBackend backend = ConicBackend::ipm;
};

struct BoundPoint {
  double lower;
  double upper;
};

struct BnbResult {
  enum class Status { optimal, infeasible, node_cap };
  Status status = Status::infeasible;
  BeamformerMatrix w_star;
  std::vector<int> a_star;
  double objective = std::numeric_limits<double>::infinity();
  long conic_solve_count = 0;
  long nodes_visited = 0;  // nodes popped and expanded (gate-pruned excluded)
  std::vector<BoundPoint> bound_trace;
  double wall_time = 0.0;
  bool rank_warning = false;   // some robust relaxation was far from rank one
  bool big_c_binding = false;  // z_aux row bound active at a solution
};

// Cache of restricted solves keyed by the sorted excluded-antenna set;
// realizes the right-child computation-reuse rule (the child that keeps
// the exclude set unchanged re-reads the parent's solve for free).
struct BoundCache {
  const ProblemInstance* inst = nullptr;
  ConicBackend backend = ConicBackend::ipm;
  bool enabled = true;  // false forces a fresh solve every time
  long solve_count = 0;
  bool rank_warning = false;

  // Solves the node relaxation with the given rows excluded (objective
  // +inf when infeasible). Throws SolverError on backend breakdown.
  const ConicSolution& solve_excluded(const std::vector<int>& excluded,
                                      int node_id);

 private:
  std::map<std::vector<int>, ConicSolution> store_;
};

// Node relaxation value and solution; fills node.lb / node.w_lb.
double lower_bound(NodeState& node, const ProblemInstance& inst,
                   BoundCache& cache);

// Feasible completion: excludes node.exclude_set plus the undecided
// antennas with the smallest relaxation row powers; fills node.ub,
// node.w_ub and node.ub_support.
double upper_bound(NodeState& node, const ProblemInstance& inst,
                   BoundCache& cache);

// Index into `open` of the non-leaf node with the lowest lb (ties: lower
// level, then smaller id); -1 when only leaves remain.
int select_node(const std::vector<NodeState>& open);

// Undecided antenna with the largest relaxation row power (ties: smallest
// index). Throws UsageError when nothing is undecided.
int select_branch_antenna(const NodeState& node, const ProblemInstance& inst);

// Left child excludes n_star, right child includes it; both are
// auto-completed (a full include set excludes the rest and vice versa).
std::pair<NodeState, NodeState> branch(const NodeState& node, int n_star,
                                       const ProblemInstance& inst,
                                       int first_child_id);

// Hook interface letting callers observe or prune popped nodes (used by
// the learned-pruning search and for training-data collection).
enum class GateDecision { branch, prune };

struct EngineView {
  double l_global;
  double u_global;
  double root_lb;
  const CMatrix& w_incumbent;
  long nodes_visited;
  long iteration;
};

struct EngineHooks {
  // Called when a non-leaf node is popped; prune discards its subtree.
  std::function<GateDecision(const NodeState&, const EngineView&)> on_pop;
};

BnbResult run_bb(const ProblemInstance& inst, const BnbConfig& config,
                 const EngineHooks* hooks = nullptr);

// Boolean-row formulation: per-antenna on/off variables bounded by
// ||W(n,:)|| <= C z_n, box-relaxed at internal nodes.
BnbResult run_bb_alt(const ProblemInstance& inst, const BnbConfig& config);

// One restricted solve per L-subset (guarded at C(N,L) <= 1e6).
BnbResult run_exhaustive(const ProblemInstance& inst,
                         ConicBackend backend = ConicBackend::ipm);

// Worst-case conic-solve counts of the two formulations.
unsigned long long q_compute(int n, int l);
unsigned long long q_compute_alt(int n, int l);

// C(n, k) with overflow detection (throws std::overflow_error).
unsigned long long binomial(int n, int k);

}  // namespace beamselect

#endif
