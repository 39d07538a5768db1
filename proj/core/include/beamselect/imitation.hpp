#ifndef BEAMSELECT_IMITATION_HPP
#define BEAMSELECT_IMITATION_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "beamselect/bnb.hpp"
#include "beamselect/gnn.hpp"
#include "beamselect/instance.hpp"

namespace beamselect {

// Online imitation learning of the node-pruning classifier: labeled data
// generation from search replays driven by the current policy, perturbed
// empirical-risk minimization over the aggregated pools, and validation-
// based policy selection.

struct TrainingPair {
  GraphSample sample;
  int label = 0;  // 1 iff the node's subtree contains the optimal leaf
  int level = 0;
  std::uint64_t instance_seed = 0;
  std::vector<int> include_set, exclude_set;  // node identity, for audits
};

// 1 iff include_set is contained in the optimal antenna set and
// exclude_set avoids it entirely.
int label_node(const NodeState& node, const std::vector<int>& a_star);

// (q 1[y=1] + 1) / max(level, 1); the class/level reweighting factor.
double pair_weight(int label, int level, double class_weight);

// pair_weight * cross-entropy with the probability clamped to
// [1e-12, 1 - 1e-12].
double weighted_loss(double prob, int label, int level, double class_weight);

struct CollectStats {
  bool feasible = false;
  long exact_nodes = 0;   // popped nodes of the labeling run
  long replay_nodes = 0;  // popped nodes of the policy-driven replay
  std::vector<int> a_star;
};

// Solves the instance exactly to obtain the optimal antenna set, then
// replays the search — unpruned when policy is null, gated by
// forward(policy, features) >= gate otherwise — emitting one labeled
// pair per popped node. Infeasible instances yield an empty list with
// stats->feasible = false.
std::vector<TrainingPair> collect_data(const ProblemInstance& inst,
                                       const GnnParams* policy, double gate,
                                       const BnbConfig& search,
                                       CollectStats* stats = nullptr);

struct TrainerConfig {
  InstanceConfig instance_template;  // per-draw seeds are derived from seed
  BnbConfig search;
  int batches = 20;             // I
  int instances_per_batch = 30;  // R
  double perturb_rate = 100.0;  // exponential rate of the objective tilt
  double class_weight = 11.0;   // q
  int epochs = 10;
  int minibatch = 128;
  double step_size = 1e-3;
  int validation_instances = 30;
  int min_validation_pairs = 500;
  int max_validation_instances = 200;  // stop hunting for pairs here
  int embed_dim = 32;
  double gate = 0.5;
  std::uint64_t seed = 1;
  std::string dataset_path;  // optional append-only pair log
  bool verbose = false;

  void validate() const;
};

struct PolicySnapshot {
  GnnParams params;
  int batch_index = 0;
  double validation_loss = std::numeric_limits<double>::infinity();
  long validation_pairs = 0;
};

struct TrainResult {
  PolicySnapshot best;
  std::vector<PolicySnapshot> snapshots;   // one per batch + final
  std::vector<RVector> perturbations;      // recorded objective tilts
  long pairs_collected = 0;
  long instances_regenerated = 0;  // infeasible draws replaced
};

// Runs the online loop: at batch i the incumbent policy both drives data
// collection (batch 1 runs unpruned) and is warm-start for minimizing
// the running-average weighted loss over all pools so far minus the
// perturbation term psi' theta, by Adam with per-step spectral
// projection. Deterministic in config.seed.
TrainResult train_online(const TrainerConfig& cfg);

// Index of the snapshot with minimal validation loss (ties: earlier
// batch index). Throws UsageError when no snapshot has validation pairs.
int select_policy(const std::vector<PolicySnapshot>& snapshots);

// Append-only text log, one record per pair; load reverses it.
void append_dataset(const std::string& path,
                    const std::vector<TrainingPair>& pairs);
std::vector<TrainingPair> load_dataset(const std::string& path);

}  // namespace beamselect

#endif
