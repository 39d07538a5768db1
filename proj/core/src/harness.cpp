#include "beamselect/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "beamselect/baselines.hpp"
#include "beamselect/bnb.hpp"
#include "beamselect/gnn.hpp"
#include "beamselect/minimal.hpp"

namespace beamselect {

double ogap(double obj, double opt) {
  if (!(opt > 0)) throw UsageError("ogap: reference optimum must be positive");
  return 100.0 * (obj - opt) / opt;
}

double speedup(double t_bb, double t_method) {
  if (!(t_method > 0)) throw UsageError("speedup: method time must be positive");
  return t_bb / t_method;
}

void ExperimentCell::validate() const {
  if (name.empty()) throw ConfigError("experiment cell: missing name");
  base.validate();
  if (trials <= 0) throw ConfigError("experiment cell: trials must be positive");
  if (methods.empty()) throw ConfigError("experiment cell: no methods listed");
  for (const auto& m : methods)
    if (m != "bb" && m != "bb-alt" && m != "exhaustive" && m != "minimal" &&
        m != "greedy" && m != "ircvxopt")
      throw ConfigError("experiment cell: unknown method " + m);
  if (!reference.empty() &&
      std::find(methods.begin(), methods.end(), reference) == methods.end())
    throw ConfigError("experiment cell: reference must be one of the methods");
  if (std::find(methods.begin(), methods.end(), std::string("minimal")) !=
          methods.end() &&
      policy_path.empty())
    throw ConfigError("experiment cell: the gated method needs a policy file");
  if (!(rel_gap > 0 && rel_gap < 1))
    throw ConfigError("experiment cell: rel_gap must lie in (0,1)");
  if (!(gate > 0 && gate < 1))
    throw ConfigError("experiment cell: gate must lie in (0,1)");
}

std::vector<ExperimentCell> parse_experiment_spec(std::istream& is) {
  std::vector<ExperimentCell> cells;
  std::string line;
  long lineno = 0;
  bool in_cell = false;
  ExperimentCell cell;
  double gamma = 1.0, sigma2 = 1.0, eps = 0.0;
  int n = 0, m = 0, l = 0;

  auto fail = [&](const std::string& what) {
    throw ParseError("experiment spec line " + std::to_string(lineno) + ": " +
                     what);
  };
  auto flush = [&]() {
    cell.base = InstanceConfig::uniform(n, m, l, gamma, sigma2, eps,
                                        cell.seed_base);
    cell.validate();
    cells.push_back(cell);
  };

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key) || key[0] == '#') continue;
    if (key == "cell") {
      if (in_cell) fail("nested cell");
      in_cell = true;
      cell = ExperimentCell{};
      gamma = 1.0;
      sigma2 = 1.0;
      eps = 0.0;
      n = m = l = 0;
      if (!(ss >> cell.name)) fail("cell needs a name");
      continue;
    }
    if (!in_cell) fail("directive outside a cell block");
    if (key == "end") {
      flush();
      in_cell = false;
    } else if (key == "n") {
      if (!(ss >> n)) fail("bad n");
    } else if (key == "m") {
      if (!(ss >> m)) fail("bad m");
    } else if (key == "l" || key == "budget") {
      if (!(ss >> l)) fail("bad l");
    } else if (key == "gamma") {
      if (!(ss >> gamma)) fail("bad gamma");
    } else if (key == "gamma_db") {
      double db;
      if (!(ss >> db)) fail("bad gamma_db");
      gamma = std::pow(10.0, db / 10.0);
    } else if (key == "sigma2") {
      if (!(ss >> sigma2)) fail("bad sigma2");
    } else if (key == "eps") {
      if (!(ss >> eps)) fail("bad eps");
    } else if (key == "trials") {
      if (!(ss >> cell.trials)) fail("bad trials");
    } else if (key == "seed") {
      if (!(ss >> cell.seed_base)) fail("bad seed");
    } else if (key == "rel_gap") {
      if (!(ss >> cell.rel_gap)) fail("bad rel_gap");
    } else if (key == "gate") {
      if (!(ss >> cell.gate)) fail("bad gate");
    } else if (key == "reference") {
      if (!(ss >> cell.reference)) fail("bad reference");
    } else if (key == "policy") {
      if (!(ss >> cell.policy_path)) fail("bad policy");
    } else if (key == "methods") {
      std::string method;
      while (ss >> method) cell.methods.push_back(method);
      if (cell.methods.empty()) fail("methods needs at least one entry");
    } else {
      fail("unknown key " + key);
    }
  }
  if (in_cell) throw ParseError("experiment spec: unterminated cell block");
  return cells;
}

std::vector<ExperimentCell> load_experiment_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open experiment spec: " + path);
  return parse_experiment_spec(is);
}

namespace {

std::string status_name(BnbResult::Status s) {
  switch (s) {
    case BnbResult::Status::optimal:
      return "optimal";
    case BnbResult::Status::infeasible:
      return "infeasible";
    case BnbResult::Status::node_cap:
      return "node_cap";
  }
  return "error";
}

void write_trace(const BnbResult& res, const std::string& trace_dir,
                 const RunRecord& rec) {
  if (trace_dir.empty() || res.bound_trace.empty()) return;
  std::ostringstream name;
  name << trace_dir << '/' << rec.cell << '-' << rec.method << '-' << rec.seed
       << ".trace";
  std::ofstream os(name.str());
  if (!os) throw ParseError("cannot write trace file: " + name.str());
  os.precision(17);
  os << "# iteration lower upper\n";
  for (size_t i = 0; i < res.bound_trace.size(); ++i)
    os << i << ' ' << res.bound_trace[i].lower << ' '
       << res.bound_trace[i].upper << '\n';
}

BnbResult dispatch(const std::string& method, const ProblemInstance& inst,
                   const ExperimentCell& cell, const GnnParams* policy,
                   RunRecord& rec) {
  BnbConfig bc;
  bc.rel_gap = cell.rel_gap;
  if (method == "bb") return run_bb(inst, bc);
  if (method == "bb-alt") {
    bc.formulation = BnbFormulation::z_aux;
    return run_bb_alt(inst, bc);
  }
  if (method == "exhaustive") return run_exhaustive(inst);
  if (method == "greedy") return run_greedy(inst);
  if (method == "ircvxopt") return run_ircvxopt(inst);
  if (method == "minimal") {
    MinimalConfig mc;
    mc.search = bc;
    mc.gate = cell.gate;
    MinimalResult res = run_minimal(inst, *policy, mc);
    rec.nodes_pruned = res.pruned_node_count;
    rec.classifier_calls = res.classifier_calls;
    return res;
  }
  throw UsageError("unknown method " + method);
}

}  // namespace

std::vector<RunRecord> run_experiment(const std::vector<ExperimentCell>& cells,
                                      const std::string& trace_dir,
                                      bool verbose) {
  std::vector<RunRecord> records;
  for (const auto& cell : cells) {
    cell.validate();
    GnnParams policy;
    const bool needs_policy =
        std::find(cell.methods.begin(), cell.methods.end(),
                  std::string("minimal")) != cell.methods.end();
    if (needs_policy) policy = load_params(cell.policy_path);

    for (int trial = 0; trial < cell.trials; ++trial) {
      InstanceConfig ic = cell.base;
      ic.seed = cell.seed_base + static_cast<std::uint64_t>(trial);
      ProblemInstance inst = generate_instance(ic);

      // Reference first so the other methods can report their gap.
      double ref_obj = std::numeric_limits<double>::quiet_NaN();
      std::vector<std::string> order = cell.methods;
      if (!cell.reference.empty()) {
        auto it = std::find(order.begin(), order.end(), cell.reference);
        std::rotate(order.begin(), it, it + 1);
      }
      for (const auto& method : order) {
        RunRecord rec;
        rec.cell = cell.name;
        rec.seed = ic.seed;
        rec.method = method;
        rec.n = inst.n();
        rec.m = inst.m();
        rec.l = inst.l();
        try {
          BnbResult res = dispatch(method, inst, cell,
                                   needs_policy ? &policy : nullptr, rec);
          rec.status = status_name(res.status);
          rec.feasible = res.status == BnbResult::Status::optimal;
          rec.objective = rec.feasible ? res.objective : 0.0;
          rec.conic_solves = res.conic_solve_count;
          rec.nodes_visited = res.nodes_visited;
          rec.wall_time = res.wall_time;
          if (method == cell.reference && rec.feasible)
            ref_obj = res.objective;
          if (rec.feasible && std::isfinite(ref_obj)) {
            rec.ogap_pct = ogap(res.objective, ref_obj);
            rec.optimal_flag =
                std::abs(res.objective - ref_obj) <= 1e-6 * ref_obj;
          }
          write_trace(res, trace_dir, rec);
        } catch (const std::exception& ex) {
          rec.status = "error";
          if (verbose)
            std::fprintf(stderr, "run %s/%s seed %llu failed: %s\n",
                         cell.name.c_str(), method.c_str(),
                         static_cast<unsigned long long>(rec.seed), ex.what());
        }
        if (verbose)
          std::fprintf(stderr, "%s %s seed %llu: %s obj=%.6g solves=%ld\n",
                       cell.name.c_str(), method.c_str(),
                       static_cast<unsigned long long>(rec.seed),
                       rec.status.c_str(), rec.objective, rec.conic_solves);
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

namespace {

constexpr char kCsvHeader[] =
    "cell,seed,method,n,m,l,status,feasible,objective,ogap_pct,conic_solves,"
    "nodes_visited,nodes_pruned,classifier_calls,optimal_flag,wall_time";

}  // namespace

void write_records_csv(const std::vector<RunRecord>& records,
                       const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open records csv for writing: " + path);
  os.precision(17);
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.cell << ',' << r.seed << ',' << r.method << ',' << r.n << ','
       << r.m << ',' << r.l << ',' << r.status << ',' << (r.feasible ? 1 : 0)
       << ',' << r.objective << ',' << r.ogap_pct << ',' << r.conic_solves
       << ',' << r.nodes_visited << ',' << r.nodes_pruned << ','
       << r.classifier_calls << ',' << (r.optimal_flag ? 1 : 0) << ','
       << r.wall_time << '\n';
  }
  if (!os) throw ParseError("short write to records csv: " + path);
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open records csv: " + path);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw ParseError("records csv: unexpected header in " + path);
  std::vector<RunRecord> records;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    RunRecord r;
    std::string field;
    auto next = [&]() -> std::string {
      if (!std::getline(ss, field, ','))
        throw ParseError("records csv: short row at line " +
                         std::to_string(lineno));
      return field;
    };
    r.cell = next();
    r.seed = std::stoull(next());
    r.method = next();
    r.n = std::stoi(next());
    r.m = std::stoi(next());
    r.l = std::stoi(next());
    r.status = next();
    r.feasible = std::stoi(next()) != 0;
    r.objective = std::stod(next());
    r.ogap_pct = std::stod(next());
    r.conic_solves = std::stol(next());
    r.nodes_visited = std::stol(next());
    r.nodes_pruned = std::stol(next());
    r.classifier_calls = std::stol(next());
    r.optimal_flag = std::stoi(next()) != 0;
    r.wall_time = std::stod(next());
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>>
      groups;
  for (const auto& r : records) groups[{r.cell, r.method}].push_back(&r);

  std::vector<SummaryRow> rows;
  for (const auto& [key, runs] : groups) {
    SummaryRow row;
    row.cell = key.first;
    row.method = key.second;
    row.runs = static_cast<int>(runs.size());
    double sum_obj = 0, sum_gap = 0, sq_gap = 0, sum_sv = 0, sq_sv = 0,
           sum_nd = 0, sum_t = 0;
    int gap_n = 0;
    for (const RunRecord* r : runs) {
      if (!r->feasible) continue;
      ++row.feasible_runs;
      sum_obj += r->objective;
      sum_sv += r->conic_solves;
      sq_sv += static_cast<double>(r->conic_solves) * r->conic_solves;
      sum_nd += r->nodes_visited;
      sum_t += r->wall_time;
      if (std::isfinite(r->ogap_pct)) {
        sum_gap += r->ogap_pct;
        sq_gap += r->ogap_pct * r->ogap_pct;
        ++gap_n;
      }
    }
    const int f = row.feasible_runs;
    if (f > 0) {
      row.mean_objective = sum_obj / f;
      row.mean_solves = sum_sv / f;
      row.mean_nodes = sum_nd / f;
      row.mean_time = sum_t / f;
      if (f > 1) {
        const double var =
            std::max(0.0, (sq_sv - sum_sv * sum_sv / f) / (f - 1));
        row.stderr_solves = std::sqrt(var / f);
      }
    }
    if (gap_n > 0) {
      row.mean_ogap = sum_gap / gap_n;
      if (gap_n > 1) {
        const double var =
            std::max(0.0, (sq_gap - sum_gap * sum_gap / gap_n) / (gap_n - 1));
        row.stderr_ogap = std::sqrt(var / gap_n);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void render_report(const std::vector<RunRecord>& records, std::ostream& os) {
  const auto rows = summarize(records);
  os << std::left << std::setw(24) << "cell" << std::setw(12) << "method"
     << std::right << std::setw(6) << "runs" << std::setw(6) << "feas"
     << std::setw(14) << "mean obj" << std::setw(16) << "ogap% (se)"
     << std::setw(16) << "solves (se)" << std::setw(10) << "nodes"
     << std::setw(12) << "time s" << '\n';
  for (const auto& r : rows) {
    std::ostringstream gap, sv;
    gap << std::fixed << std::setprecision(2) << r.mean_ogap << " ("
        << r.stderr_ogap << ')';
    sv << std::fixed << std::setprecision(1) << r.mean_solves << " ("
       << r.stderr_solves << ')';
    os << std::left << std::setw(24) << r.cell << std::setw(12) << r.method
       << std::right << std::setw(6) << r.runs << std::setw(6)
       << r.feasible_runs << std::setw(14) << std::setprecision(6)
       << r.mean_objective << std::setw(16) << gap.str() << std::setw(16)
       << sv.str() << std::setw(10) << std::setprecision(1) << std::fixed
       << r.mean_nodes << std::setw(12) << std::setprecision(3) << r.mean_time
       << '\n';
    os.unsetf(std::ios::fixed);
  }
}

}  // namespace beamselect
