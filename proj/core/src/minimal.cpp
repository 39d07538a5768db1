#include "beamselect/minimal.hpp"

#include <cmath>
#include <stdexcept>

namespace beamselect {

MinimalResult run_minimal_scored(const ProblemInstance& inst,
                                 const NodeScorer& score,
                                 const MinimalConfig& cfg) {
  if (!(cfg.gate > 0 && cfg.gate < 1))
    throw UsageError("run_minimal: gate must lie in (0,1)");
  if (!score) throw UsageError("run_minimal: empty scorer");
  MinimalResult result;
  EngineHooks hooks;
  hooks.on_pop = [&](const NodeState& node, const EngineView& view) {
    GraphSample sample =
        extract_features(node, view, cfg.search.rel_gap, inst);
    ++result.classifier_calls;
    if (score(node, sample) < cfg.gate) {
      ++result.pruned_node_count;
      return GateDecision::prune;
    }
    return GateDecision::branch;
  };
  static_cast<BnbResult&>(result) = run_bb(inst, cfg.search, &hooks);
  // With nothing pruned the run is a plain exact search, so the result
  // carries the same optimality certificate.
  result.optimal_flag = result.status == BnbResult::Status::optimal &&
                        result.pruned_node_count == 0;
  return result;
}

MinimalResult run_minimal(const ProblemInstance& inst,
                          const GnnParams& policy, const MinimalConfig& cfg) {
  return run_minimal_scored(
      inst,
      [&policy](const NodeState&, const GraphSample& sample) {
        return forward(policy, sample);
      },
      cfg);
}

double node_budget_bound(double rho, int n) {
  if (!(rho > 0.5 && rho <= 1.0))
    throw std::domain_error("node_budget_bound: rho must lie in (0.5, 1]");
  if (n <= 0) throw std::domain_error("node_budget_bound: n must be positive");
  return 2.0 * n * (2.0 * rho - std::pow(rho, n)) / (2.0 * rho - 1.0) + 1.0;
}

double accuracy_lower_bound(double expected_loss) {
  if (!(expected_loss >= 0))
    throw std::domain_error("accuracy_lower_bound: loss must be nonnegative");
  return std::exp(-expected_loss);
}

double optimality_probability(double rho, int n) {
  if (!(rho >= 0 && rho <= 1) || n <= 0)
    throw std::domain_error("optimality_probability: bad arguments");
  return std::pow(rho, n);
}

}  // namespace beamselect
