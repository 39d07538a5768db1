// Command-line surface: instance generation, single solves, policy
// training, batch experiments, and report rendering.

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "beamselect/baselines.hpp"
#include "beamselect/bnb.hpp"
#include "beamselect/gnn.hpp"
#include "beamselect/harness.hpp"
#include "beamselect/imitation.hpp"
#include "beamselect/minimal.hpp"

namespace {

using namespace beamselect;

int cmd_gen(int n, int m, int l, double gamma, double gamma_db, double sigma2,
            double eps, std::uint64_t seed, const std::string& out) {
  if (gamma_db != 0.0) gamma = std::pow(10.0, gamma_db / 10.0);
  InstanceConfig cfg =
      InstanceConfig::uniform(n, m, l, gamma, sigma2, eps, seed);
  ProblemInstance inst = generate_instance(cfg);
  save_instance(inst, out);
  std::cout << "wrote " << out << " (N=" << n << " M=" << m << " L=" << l
            << " gamma=" << gamma << " eps=" << eps << ")\n";
  return 0;
}

void write_result(std::ostream& os, const std::string& method,
                  const BnbResult& res, const MinimalResult* gated,
                  bool have_ref, double ref_obj) {
  os.precision(17);
  const char* status = res.status == BnbResult::Status::optimal ? "optimal"
                       : res.status == BnbResult::Status::infeasible
                           ? "infeasible"
                           : "node_cap";
  os << "method " << method << "\nstatus " << status << "\nobjective "
     << res.objective << "\nconic_solves " << res.conic_solve_count
     << "\nnodes_visited " << res.nodes_visited << "\nwall_time "
     << res.wall_time << "\nantennas";
  for (int a : res.a_star) os << ' ' << a;
  os << '\n';
  if (gated) {
    os << "nodes_pruned " << gated->pruned_node_count << "\nclassifier_calls "
       << gated->classifier_calls << '\n';
  }
  if (have_ref) {
    os << "reference_objective " << ref_obj << "\nogap_pct "
       << ogap(res.objective, ref_obj) << "\noptimal_flag "
       << (std::abs(res.objective - ref_obj) <= 1e-6 * ref_obj ? 1 : 0)
       << '\n';
  }
  if (res.status == BnbResult::Status::optimal) {
    os << "w_matrix " << res.w_star.w.rows() << ' ' << res.w_star.w.cols()
       << '\n';
    for (Eigen::Index i = 0; i < res.w_star.w.rows(); ++i) {
      for (Eigen::Index j = 0; j < res.w_star.w.cols(); ++j)
        os << (j ? " " : "") << res.w_star.w(i, j).real() << ' '
           << res.w_star.w(i, j).imag();
      os << '\n';
    }
  }
}

int cmd_solve(const std::string& method, const std::string& instance_path,
              double rel_gap, const std::string& out,
              const std::string& trace_path, const std::string& policy_path,
              double gate, const std::string& reference) {
  ProblemInstance inst = load_instance(instance_path);
  BnbConfig bc;
  bc.rel_gap = rel_gap;
  BnbResult res;
  MinimalResult gated;
  bool is_gated = false;
  if (method == "bb") {
    res = run_bb(inst, bc);
  } else if (method == "bb-alt") {
    bc.formulation = BnbFormulation::z_aux;
    res = run_bb_alt(inst, bc);
  } else if (method == "exhaustive") {
    res = run_exhaustive(inst);
  } else if (method == "greedy") {
    res = run_greedy(inst);
  } else if (method == "ircvxopt") {
    res = run_ircvxopt(inst);
  } else if (method == "minimal") {
    if (policy_path.empty())
      throw ConfigError("--method minimal requires --policy");
    MinimalConfig mc;
    mc.search = bc;
    mc.gate = gate;
    gated = run_minimal(inst, load_params(policy_path), mc);
    res = gated;
    is_gated = true;
  } else {
    throw ConfigError("unknown --method " + method);
  }

  bool have_ref = false;
  double ref_obj = 0.0;
  if (reference == "exact") {
    BnbResult exact = run_bb(inst, bc);
    if (exact.status == BnbResult::Status::optimal) {
      have_ref = true;
      ref_obj = exact.objective;
    }
  } else if (!reference.empty()) {
    throw ConfigError("--reference supports only 'exact'");
  }

  if (!trace_path.empty()) {
    std::ofstream ts(trace_path);
    if (!ts) throw ParseError("cannot write trace: " + trace_path);
    ts.precision(17);
    ts << "# iteration lower upper\n";
    for (size_t i = 0; i < res.bound_trace.size(); ++i)
      ts << i << ' ' << res.bound_trace[i].lower << ' '
         << res.bound_trace[i].upper << '\n';
  }
  if (out.empty()) {
    write_result(std::cout, method, res, is_gated ? &gated : nullptr,
                 have_ref, ref_obj);
  } else {
    std::ofstream os(out);
    if (!os) throw ParseError("cannot write result: " + out);
    write_result(os, method, res, is_gated ? &gated : nullptr, have_ref,
                 ref_obj);
    std::cout << "wrote " << out << '\n';
  }
  return res.status == BnbResult::Status::optimal ? 0 : 2;
}

TrainerConfig load_trainer_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open trainer config: " + path);
  TrainerConfig cfg;
  int n = 0, m = 0, l = 0;
  double gamma = 1.0, sigma2 = 1.0, eps = 0.0;
  std::string key;
  while (is >> key) {
    if (key[0] == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    if (key == "n") is >> n;
    else if (key == "m") is >> m;
    else if (key == "l" || key == "budget") is >> l;
    else if (key == "gamma") is >> gamma;
    else if (key == "gamma_db") {
      double db;
      is >> db;
      gamma = std::pow(10.0, db / 10.0);
    } else if (key == "sigma2") is >> sigma2;
    else if (key == "eps") is >> eps;
    else if (key == "batches") is >> cfg.batches;
    else if (key == "instances_per_batch") is >> cfg.instances_per_batch;
    else if (key == "perturb_rate") is >> cfg.perturb_rate;
    else if (key == "class_weight") is >> cfg.class_weight;
    else if (key == "epochs") is >> cfg.epochs;
    else if (key == "minibatch") is >> cfg.minibatch;
    else if (key == "step_size") is >> cfg.step_size;
    else if (key == "validation_instances") is >> cfg.validation_instances;
    else if (key == "min_validation_pairs") is >> cfg.min_validation_pairs;
    else if (key == "max_validation_instances")
      is >> cfg.max_validation_instances;
    else if (key == "embed_dim") is >> cfg.embed_dim;
    else if (key == "gate") is >> cfg.gate;
    else if (key == "seed") is >> cfg.seed;
    else if (key == "rel_gap") is >> cfg.search.rel_gap;
    else if (key == "dataset") is >> cfg.dataset_path;
    else throw ParseError("trainer config: unknown key " + key);
    if (!is) throw ParseError("trainer config: bad value for " + key);
  }
  cfg.instance_template =
      InstanceConfig::uniform(n, m, l, gamma, sigma2, eps, 0);
  return cfg;
}

int cmd_train(const std::string& config_path, const std::string& out,
              bool verbose) {
  TrainerConfig cfg = load_trainer_config(config_path);
  cfg.verbose = verbose;
  TrainResult result = train_online(cfg);
  save_params(result.best.params, out);
  std::cout << "trained " << result.snapshots.size() << " snapshots over "
            << result.pairs_collected << " pairs; selected policy from batch "
            << result.best.batch_index << " (validation loss "
            << result.best.validation_loss << "); wrote " << out << '\n';
  return 0;
}

int cmd_eval(const std::string& spec_path, const std::string& out,
             const std::string& trace_dir, bool verbose) {
  auto cells = load_experiment_spec(spec_path);
  auto records = run_experiment(cells, trace_dir, verbose);
  write_records_csv(records, out);
  std::cout << "wrote " << records.size() << " records to " << out << '\n';
  render_report(records, std::cout);
  return 0;
}

int cmd_report(const std::string& records_path, const std::string& out) {
  auto records = read_records_csv(records_path);
  if (out.empty()) {
    render_report(records, std::cout);
  } else {
    std::ofstream os(out);
    if (!os) throw ParseError("cannot write report: " + out);
    render_report(records, os);
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint antenna selection and downlink beamforming toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random problem instance");
  int n = 8, m = 4, l = 4;
  double gamma = 1.0, gamma_db = 0.0, sigma2 = 1.0, eps = 0.0;
  std::uint64_t seed = 1;
  std::string gen_out = "instance.txt";
  gen->add_option("--n", n, "antenna count");
  gen->add_option("--m", m, "user count");
  gen->add_option("--l", l, "active-antenna budget");
  gen->add_option("--gamma", gamma, "SINR target (linear)");
  gen->add_option("--gamma-db", gamma_db, "SINR target (dB; overrides --gamma)");
  gen->add_option("--sigma2", sigma2, "noise variance");
  gen->add_option("--eps", eps, "channel uncertainty radius (robust when > 0)");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", gen_out, "output instance file");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  std::string method = "bb", instance_path, solve_out, trace_path,
              policy_path, reference;
  double rel_gap = 1e-4, gate = 0.5;
  solve->add_option("--method", method,
                    "bb | bb-alt | exhaustive | minimal | greedy | ircvxopt");
  solve->add_option("--instance", instance_path, "instance file")->required();
  solve->add_option("--rel-gap", rel_gap, "termination gap");
  solve->add_option("--out", solve_out, "result file (stdout if omitted)");
  solve->add_option("--trace", trace_path, "bound-trace output file");
  solve->add_option("--policy", policy_path, "policy checkpoint (minimal)");
  solve->add_option("--gate", gate, "pruning threshold (minimal)");
  solve->add_option("--reference", reference,
                    "'exact' adds gap and optimality fields");

  // train
  auto* train = app.add_subcommand("train", "Train the pruning policy");
  std::string train_config, train_out = "policy.ckpt";
  bool train_verbose = false;
  train->add_option("--config", train_config, "trainer config file")
      ->required();
  train->add_option("--out", train_out, "checkpoint output path");
  train->add_flag("--verbose", train_verbose, "per-snapshot progress");

  // eval
  auto* eval = app.add_subcommand("eval", "Run an experiment spec");
  std::string eval_spec, eval_out = "records.csv", eval_trace;
  bool eval_verbose = false;
  eval->add_option("--spec", eval_spec, "experiment spec file")->required();
  eval->add_option("--out", eval_out, "records CSV output");
  eval->add_option("--trace", eval_trace, "directory for bound-trace files");
  eval->add_flag("--verbose", eval_verbose, "per-run progress");

  // report
  auto* report = app.add_subcommand("report", "Summarize a records CSV");
  std::string report_records, report_out;
  report->add_option("--records", report_records, "records CSV")->required();
  report->add_option("--out", report_out, "report file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen(n, m, l, gamma, gamma_db, sigma2, eps, seed, gen_out);
    if (solve->parsed())
      return cmd_solve(method, instance_path, rel_gap, solve_out, trace_path,
                       policy_path, gate, reference);
    if (train->parsed()) return cmd_train(train_config, train_out, train_verbose);
    if (eval->parsed())
      return cmd_eval(eval_spec, eval_out, eval_trace, eval_verbose);
    if (report->parsed()) return cmd_report(report_records, report_out);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
