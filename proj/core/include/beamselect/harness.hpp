#ifndef BEAMSELECT_HARNESS_HPP
#define BEAMSELECT_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "beamselect/instance.hpp"

namespace beamselect {

// Batch experiments: metric helpers, the cell-spec runner, per-run CSV
// persistence, and aggregate report rendering. Every summary number is
// recomputable from the persisted per-run records.

// Percentage excess power over the reference optimum: 100 (obj-opt)/opt.
double ogap(double obj, double opt);

// Runtime ratio of the exact search against a competing method.
double speedup(double t_bb, double t_method);

struct RunRecord {
  std::string cell;
  std::uint64_t seed = 0;
  std::string method;
  int n = 0, m = 0, l = 0;
  std::string status;  // optimal | infeasible | node_cap | error
  bool feasible = false;
  double objective = 0.0;
  double ogap_pct = std::numeric_limits<double>::quiet_NaN();
  long conic_solves = 0;
  long nodes_visited = 0;
  long nodes_pruned = 0;
  long classifier_calls = 0;
  bool optimal_flag = false;  // matched the exact reference (when present)
  double wall_time = 0.0;     // solve span only, monotonic clock
};

struct ExperimentCell {
  std::string name;
  InstanceConfig base;  // per-trial seeds are seed_base + trial index
  int trials = 1;
  std::uint64_t seed_base = 1;
  std::vector<std::string> methods;  // bb bb-alt exhaustive minimal greedy ircvxopt
  std::string reference;             // method name supplying the optimum, or ""
  std::string policy_path;           // checkpoint for the gated search
  double gate = 0.5;
  double rel_gap = 1e-4;

  void validate() const;
};

// Structured text: one `cell NAME` ... `end` block per cell with
// `key value` lines (n m l budget gamma gamma_db sigma2 eps trials seed
// rel_gap gate methods reference policy). Throws ParseError.
std::vector<ExperimentCell> parse_experiment_spec(std::istream& is);
std::vector<ExperimentCell> load_experiment_spec(const std::string& path);

// Executes every (cell, trial, method); per-run failures are recorded as
// status=error and the run continues. When trace_dir is nonempty, each
// run's lower/upper bound trace is written to
// trace_dir/<cell>-<method>-<seed>.trace (iteration lower upper).
std::vector<RunRecord> run_experiment(const std::vector<ExperimentCell>& cells,
                                      const std::string& trace_dir = "",
                                      bool verbose = false);

// One line per run; the first line is a documented header.
void write_records_csv(const std::vector<RunRecord>& records,
                       const std::string& path);
std::vector<RunRecord> read_records_csv(const std::string& path);

struct SummaryRow {
  std::string cell, method;
  int runs = 0;
  int feasible_runs = 0;
  double mean_objective = 0.0;
  double mean_ogap = 0.0, stderr_ogap = 0.0;
  double mean_solves = 0.0, stderr_solves = 0.0;
  double mean_nodes = 0.0;
  double mean_time = 0.0;
};

// Group records by (cell, method); means and standard errors over the
// feasible runs.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

// Plain-text table of the summary rows.
void render_report(const std::vector<RunRecord>& records, std::ostream& os);

}  // namespace beamselect

#endif
