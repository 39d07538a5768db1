#ifndef BEAMSELECT_MINIMAL_HPP
#define BEAMSELECT_MINIMAL_HPP

#include "beamselect/bnb.hpp"
#include "beamselect/gnn.hpp"

namespace beamselect {

// Classifier-gated search: identical to the exact branch-and-bound
// except that a popped node whose classifier score falls below the gate
// is discarded without branching (its already-computed bounds still
// improved the incumbent). Returns the incumbent, which is optimal only
// with probability governed by the per-node classifier accuracy.

struct MinimalConfig {
  BnbConfig search;
  double gate = 0.5;  // prune when classifier output < gate
};

struct MinimalResult : BnbResult {
  long pruned_node_count = 0;
  long classifier_calls = 0;
  // Set by callers holding an exact reference (objective within
  // tolerance of the exact optimum); false otherwise/unknown.
  bool optimal_flag = false;
};

MinimalResult run_minimal(const ProblemInstance& inst,
                          const GnnParams& policy, const MinimalConfig& cfg);

// Same search driven by an arbitrary node scorer (e.g. a ground-truth
// label oracle); the trained-policy entry point above delegates here.
using NodeScorer = std::function<double(const NodeState&, const GraphSample&)>;
MinimalResult run_minimal_scored(const ProblemInstance& inst,
                                 const NodeScorer& score,
                                 const MinimalConfig& cfg);

// Worst-case visited-node budget 2N(2 rho - rho^N) / (2 rho - 1) + 1 of
// the gated search under per-node accuracy rho. Domain: rho in (0.5, 1].
double node_budget_bound(double rho, int n);

// Per-node accuracy floor exp(-expected_loss) implied by the validation
// loss of a trained policy.
double accuracy_lower_bound(double expected_loss);

// Probability floor rho^N that the gated search returns the optimum.
double optimality_probability(double rho, int n);

}  // namespace beamselect

#endif
