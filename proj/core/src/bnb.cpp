#include "beamselect/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace beamselect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> sorted_union(const std::vector<int>& a, int extra) {
  std::vector<int> out = a;
  out.insert(std::lower_bound(out.begin(), out.end(), extra), extra);
  return out;
}

std::vector<int> set_complement(int n, const std::vector<int>& s) {
  std::vector<bool> in(n, false);
  for (int i : s) in[i] = true;
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

// Auto-completion: a full include set shuts down the rest; a full exclude
// set activates the rest.
void complete_node(NodeState& node, int n, int l) {
  if (static_cast<int>(node.include_set.size()) == l)
    node.exclude_set = set_complement(n, node.include_set);
  else if (static_cast<int>(node.exclude_set.size()) == n - l)
    node.include_set = set_complement(n, node.exclude_set);
  node.is_leaf = static_cast<int>(node.include_set.size()) == l &&
                 static_cast<int>(node.exclude_set.size()) == n - l;
}

double rel_gap_of(double lower, double upper) {
  if (!std::isfinite(upper)) return kInf;
  if (upper <= lower) return 0.0;
  if (lower <= 0.0) return kInf;
  return (upper - lower) / lower;
}

using LowerBoundFn = std::function<double(NodeState&)>;
using UpperBoundFn = std::function<double(NodeState&)>;

// Shared best-first loop used by both formulations and by the learned
// search: pop the open node with the lowest lb, optionally gate it,
// branch, bound the children, update the global bounds, fathom.
BnbResult run_engine(const ProblemInstance& inst, const BnbConfig& config,
                     const EngineHooks* hooks, const LowerBoundFn& lb_fn,
                     const UpperBoundFn& ub_fn, const long& solve_count,
                     const bool& rank_warning) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = inst.n();
  const int l = inst.l();
  BnbResult res;

  NodeState root;
  complete_node(root, n, l);
  long nodes_visited = 0;  // popped-and-branched nodes (pruned pops excluded)
  int next_id = 1;

  auto finish = [&](BnbResult::Status status, double l_global, double u_global,
                    const CMatrix& w_inc, const std::vector<int>& a_star) {
    res.status = status;
    res.objective = u_global;
    res.w_star = BeamformerMatrix::from_dense(
        w_inc.size() > 0 ? w_inc : CMatrix::Zero(n, inst.m()), 0.0);
    res.a_star = a_star;
    res.conic_solve_count = solve_count;
    res.nodes_visited = nodes_visited;
    res.rank_warning = rank_warning;
    res.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
    (void)l_global;
    return res;
  };

  lb_fn(root);
  if (!std::isfinite(root.lb))
    return finish(BnbResult::Status::infeasible, kInf, kInf, CMatrix(), {});
  ub_fn(root);

  double l_global = root.lb;
  double u_global = root.ub;
  CMatrix w_incumbent = root.w_ub;
  std::vector<int> a_star = set_complement(n, root.ub_support);
  const double root_lb = root.lb;
  res.bound_trace.push_back({l_global, u_global});

  std::vector<NodeState> open;
  open.push_back(root);
  long iteration = 0;
  bool capped = false;

  while (true) {
    if (rel_gap_of(l_global, u_global) <= config.rel_gap) break;
    int idx = select_node(open);
    if (idx < 0) {
      // Only leaves (or nothing) remain: the search space is exhausted.
      l_global = std::min(u_global, std::max(l_global, u_global));
      break;
    }
    if (config.max_nodes > 0 && nodes_visited >= config.max_nodes) {
      capped = true;
      break;
    }
    NodeState node = std::move(open[idx]);
    open.erase(open.begin() + idx);
    ++iteration;

    if (hooks && hooks->on_pop) {
      EngineView view{l_global,      u_global, root_lb, w_incumbent,
                      nodes_visited, iteration};
      if (hooks->on_pop(node, view) == GateDecision::prune) {
        // Discard the subtree; bounds already reflected in u_global stay.
        res.bound_trace.push_back({l_global, u_global});
        continue;
      }
    }

    int n_star = select_branch_antenna(node, inst);
    auto [left, right] = branch(node, n_star, inst, next_id);
    next_id += 2;
    ++nodes_visited;

    NodeState* children[2] = {&left, &right};
    for (NodeState* child : children) {
      lb_fn(*child);
      if (std::isfinite(child->lb)) ub_fn(*child);
    }
    NodeState* best_child = left.ub <= right.ub ? &left : &right;
    if (best_child->ub <= u_global && std::isfinite(best_child->ub)) {
      u_global = best_child->ub;
      w_incumbent = best_child->w_ub;
      a_star = set_complement(n, best_child->ub_support);
    }
    for (NodeState* child : children)
      if (std::isfinite(child->lb)) open.push_back(std::move(*child));

    double l_new = kInf;
    for (const auto& nd : open) l_new = std::min(l_new, nd.lb);
    if (open.empty()) l_new = u_global;
    l_global = std::max(l_global, std::min(l_new, u_global));

    open.erase(std::remove_if(open.begin(), open.end(),
                              [&](const NodeState& nd) {
                                return nd.lb > u_global;
                              }),
               open.end());
    res.bound_trace.push_back({l_global, u_global});
  }

  if (!std::isfinite(u_global))
    return finish(BnbResult::Status::infeasible, l_global, kInf, CMatrix(),
                  {});
  return finish(capped ? BnbResult::Status::node_cap
                       : BnbResult::Status::optimal,
                l_global, u_global, w_incumbent, a_star);
}

}  // namespace

bool NodeState::decided(int antenna) const {
  return std::binary_search(include_set.begin(), include_set.end(), antenna) ||
         std::binary_search(exclude_set.begin(), exclude_set.end(), antenna);
}

std::vector<int> NodeState::undecided(int n) const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!decided(i)) out.push_back(i);
  return out;
}

const ConicSolution& BoundCache::solve_excluded(
    const std::vector<int>& excluded, int node_id) {
  std::vector<int> key = excluded;
  std::sort(key.begin(), key.end());
  if (enabled) {
    auto it = store_.find(key);
    if (it != store_.end()) return it->second;
  }

  ConicProgram prog = inst->config.csi_mode == CsiMode::robust
                          ? build_rbf_sdr(*inst, key)
                          : build_bf_socp(*inst, key);
  ConicSolution sol = solve(prog, backend);
  if (sol.status == ConicSolution::Status::numerical_error) {
    // Retry on the reference backend before giving up.
    ConicBackend other = backend == ConicBackend::ipm ? ConicBackend::barrier
                                                      : ConicBackend::ipm;
    sol = solve(prog, other);
  }
  ++solve_count;
  if (sol.status == ConicSolution::Status::numerical_error) {
    std::ostringstream msg;
    msg << "conic backend failed at node " << node_id;
    throw SolverError(msg.str());
  }
  if (inst->config.csi_mode == CsiMode::robust &&
      sol.status == ConicSolution::Status::optimal && sol.rank_warning)
    rank_warning = true;
  if (!enabled) {
    static thread_local ConicSolution scratch;
    scratch = std::move(sol);
    return scratch;
  }
  return store_.emplace(std::move(key), std::move(sol)).first->second;
}

double lower_bound(NodeState& node, const ProblemInstance& inst,
                   BoundCache& cache) {
  const ConicSolution& sol = cache.solve_excluded(node.exclude_set, node.id);
  node.lb = sol.objective;
  if (sol.status == ConicSolution::Status::optimal) {
    node.w_lb = sol.w.w;
    node.row_powers_lb = sol.row_powers;
  } else {
    node.w_lb = CMatrix();
    node.row_powers_lb = RVector::Zero(inst.n());
  }
  return node.lb;
}

double upper_bound(NodeState& node, const ProblemInstance& inst,
                   BoundCache& cache) {
  if (!std::isfinite(node.lb)) {
    node.ub = kInf;
    node.ub_support.clear();
    return node.ub;
  }
  const int n = inst.n();
  const int l = inst.l();
  std::vector<int> undecided = node.undecided(n);
  const int need = (n - l) - static_cast<int>(node.exclude_set.size());
  std::stable_sort(undecided.begin(), undecided.end(), [&](int a, int b) {
    return node.row_powers_lb(a) < node.row_powers_lb(b);
  });
  std::vector<int> btilde = node.exclude_set;
  btilde.insert(btilde.end(), undecided.begin(), undecided.begin() + need);
  std::sort(btilde.begin(), btilde.end());

  const ConicSolution& sol = cache.solve_excluded(btilde, node.id);
  node.ub_support = btilde;
  if (sol.status == ConicSolution::Status::optimal) {
    node.ub = sol.objective;
    node.w_ub = sol.w.w;
  } else {
    node.ub = kInf;
    node.w_ub = CMatrix();
  }
  return node.ub;
}

int select_node(const std::vector<NodeState>& open) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(open.size()); ++i) {
    if (open[i].is_leaf) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const NodeState& a = open[i];
    const NodeState& b = open[best];
    if (a.lb < b.lb ||
        (a.lb == b.lb &&
         (a.level < b.level || (a.level == b.level && a.id < b.id))))
      best = i;
  }
  return best;
}

int select_branch_antenna(const NodeState& node, const ProblemInstance& inst) {
  std::vector<int> undecided = node.undecided(inst.n());
  if (undecided.empty())
    throw UsageError("select_branch_antenna: node has no undecided antennas");
  int best = undecided.front();
  for (int i : undecided)
    if (node.row_powers_lb(i) > node.row_powers_lb(best)) best = i;
  return best;
}

std::pair<NodeState, NodeState> branch(const NodeState& node, int n_star,
                                       const ProblemInstance& inst,
                                       int first_child_id) {
  if (node.decided(n_star))
    throw UsageError("branch: antenna already decided");
  NodeState left, right;
  left.include_set = node.include_set;
  left.exclude_set = sorted_union(node.exclude_set, n_star);
  right.include_set = sorted_union(node.include_set, n_star);
  right.exclude_set = node.exclude_set;
  for (NodeState* child : {&left, &right}) {
    child->level = node.level + 1;
    child->parent = node.id;
  }
  left.id = first_child_id;
  right.id = first_child_id + 1;
  complete_node(left, inst.n(), inst.l());
  complete_node(right, inst.n(), inst.l());
  return {std::move(left), std::move(right)};
}

BnbResult run_bb(const ProblemInstance& inst, const BnbConfig& config,
                 const EngineHooks* hooks) {
  inst.config.validate();
  if (config.rel_gap <= 0 || config.rel_gap >= 1)
    throw ConfigError("rel_gap must lie in (0, 1)");
  BoundCache cache;
  cache.inst = &inst;
  cache.backend = config.backend;
  cache.enabled = config.reuse_right_child;
  LowerBoundFn lb_fn = [&](NodeState& nd) {
    return lower_bound(nd, inst, cache);
  };
  UpperBoundFn ub_fn = [&](NodeState& nd) {
    return upper_bound(nd, inst, cache);
  };
  return run_engine(inst, config, hooks, lb_fn, ub_fn, cache.solve_count,
                    cache.rank_warning);
}

BnbResult run_bb_alt(const ProblemInstance& inst, const BnbConfig& config) {
  inst.config.validate();
  if (inst.config.csi_mode == CsiMode::robust)
    throw UsageError("z-variable formulation supports perfect CSI only");
  if (config.rel_gap <= 0 || config.rel_gap >= 1)
    throw ConfigError("rel_gap must lie in (0, 1)");

  BoundCache cache;
  cache.inst = &inst;
  cache.backend = config.backend;
  cache.enabled = config.reuse_right_child;

  double big_c = config.big_c;
  if (big_c <= 0) {
    const ConicSolution& full = cache.solve_excluded({}, 0);
    if (full.status != ConicSolution::Status::optimal) {
      BnbResult res;
      res.status = BnbResult::Status::infeasible;
      res.conic_solve_count = cache.solve_count;
      return res;
    }
    big_c = 10.0 * std::sqrt(full.objective);
  }

  bool big_c_binding = false;
  std::map<std::pair<std::vector<int>, std::vector<int>>, ConicSolution>
      relax_cache;
  LowerBoundFn lb_fn = [&](NodeState& nd) {
    if (nd.is_leaf) return lower_bound(nd, inst, cache);
    auto key = std::make_pair(nd.include_set, nd.exclude_set);
    auto it = relax_cache.find(key);
    if (it == relax_cache.end() || !cache.enabled) {
      ConicProgram prog =
          build_z_relaxation(inst, nd.include_set, nd.exclude_set, big_c);
      ConicSolution sol = solve(prog, config.backend);
      if (sol.status == ConicSolution::Status::numerical_error)
        sol = solve(prog, config.backend == ConicBackend::ipm
                              ? ConicBackend::barrier
                              : ConicBackend::ipm);
      ++cache.solve_count;
      if (sol.status == ConicSolution::Status::numerical_error) {
        std::ostringstream msg;
        msg << "conic backend failed at node " << nd.id;
        throw SolverError(msg.str());
      }
      if (sol.status == ConicSolution::Status::optimal)
        for (int i = 0; i < inst.n(); ++i)
          if (std::sqrt(sol.row_powers(i)) >= big_c * (1.0 - 1e-6))
            big_c_binding = true;
      it = relax_cache.emplace(std::move(key), std::move(sol)).first;
    }
    const ConicSolution& sol = it->second;
    nd.lb = sol.objective;
    if (sol.status == ConicSolution::Status::optimal) {
      nd.w_lb = sol.w.w;
      nd.row_powers_lb = sol.row_powers;
    } else {
      nd.w_lb = CMatrix();
      nd.row_powers_lb = RVector::Zero(inst.n());
    }
    return nd.lb;
  };
  UpperBoundFn ub_fn = [&](NodeState& nd) {
    return upper_bound(nd, inst, cache);
  };
  BnbResult res = run_engine(inst, config, nullptr, lb_fn, ub_fn,
                             cache.solve_count, cache.rank_warning);
  res.big_c_binding = big_c_binding;
  return res;
}

BnbResult run_exhaustive(const ProblemInstance& inst, ConicBackend backend) {
  inst.config.validate();
  const int n = inst.n();
  const int l = inst.l();
  unsigned long long count = binomial(n, l);
  if (count > 1000000ULL)
    throw UsageError("run_exhaustive: subset count exceeds the 1e6 guard");

  const auto t_start = std::chrono::steady_clock::now();
  BoundCache cache;
  cache.inst = &inst;
  cache.backend = backend;
  BnbResult res;
  res.status = BnbResult::Status::infeasible;

  // Lexicographic L-subset enumeration.
  std::vector<int> subset(l);
  for (int i = 0; i < l; ++i) subset[i] = i;
  long visited = 0;
  while (true) {
    ++visited;
    std::vector<int> excluded = set_complement(n, subset);
    const ConicSolution& sol =
        cache.solve_excluded(excluded, static_cast<int>(visited));
    if (sol.status == ConicSolution::Status::optimal &&
        sol.objective < res.objective) {
      res.objective = sol.objective;
      res.w_star = BeamformerMatrix::from_dense(sol.w.w, 0.0);
      res.a_star = subset;
      res.status = BnbResult::Status::optimal;
    }
    // Advance to the next subset.
    int i = l - 1;
    while (i >= 0 && subset[i] == n - l + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < l; ++j) subset[j] = subset[j - 1] + 1;
  }
  res.conic_solve_count = cache.solve_count;
  res.nodes_visited = visited;
  res.rank_warning = cache.rank_warning;
  if (res.status == BnbResult::Status::optimal)
    res.bound_trace.push_back({res.objective, res.objective});
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 res = 1;
  for (int i = 1; i <= k; ++i) {
    res = res * static_cast<unsigned __int128>(n - k + i);
    res /= static_cast<unsigned __int128>(i);
    if (res > std::numeric_limits<unsigned long long>::max())
      throw std::overflow_error("binomial: result exceeds 64 bits");
  }
  return static_cast<unsigned long long>(res);
}

unsigned long long q_compute(int n, int l) {
  if (l < 1 || l > n) throw UsageError("q_compute: need 1 <= L <= N");
  unsigned __int128 total = binomial(n, l);
  for (int i = 2; i <= n - l + 1; ++i) {
    total += binomial(n - i, l - 1);
    if (total > std::numeric_limits<unsigned long long>::max())
      throw std::overflow_error("q_compute: result exceeds 64 bits");
  }
  return static_cast<unsigned long long>(total);
}

unsigned long long q_compute_alt(int n, int l) {
  if (l < 1 || l > n) throw UsageError("q_compute_alt: need 1 <= L <= N");
  unsigned long long c = binomial(n, l);
  if (c > std::numeric_limits<unsigned long long>::max() / 2)
    throw std::overflow_error("q_compute_alt: result exceeds 64 bits");
  return 2 * c - 1;
}

}  // namespace beamselect
