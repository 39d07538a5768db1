#include "beamselect/imitation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace beamselect {

namespace {

bool subset_of(const std::vector<int>& a, const std::vector<int>& b) {
  // Both sorted.
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  // Both sorted.
  std::vector<int> tmp;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(tmp));
  return tmp.empty();
}

double clamp_prob(double p) {
  return std::min(1.0 - 1e-12, std::max(1e-12, p));
}

}  // namespace

int label_node(const NodeState& node, const std::vector<int>& a_star) {
  std::vector<int> opt = a_star;
  std::sort(opt.begin(), opt.end());
  return subset_of(node.include_set, opt) && disjoint(node.exclude_set, opt)
             ? 1
             : 0;
}

double pair_weight(int label, int level, double class_weight) {
  return (label == 1 ? class_weight + 1.0 : 1.0) / std::max(level, 1);
}

double weighted_loss(double prob, int label, int level, double class_weight) {
  const double p = clamp_prob(prob);
  const double ce = label == 1 ? -std::log(p) : -std::log(1.0 - p);
  return pair_weight(label, level, class_weight) * ce;
}

std::vector<TrainingPair> collect_data(const ProblemInstance& inst,
                                       const GnnParams* policy, double gate,
                                       const BnbConfig& search,
                                       CollectStats* stats) {
  if (stats) *stats = CollectStats{};
  BnbResult exact = run_bb(inst, search);
  if (exact.status != BnbResult::Status::optimal || exact.a_star.empty()) {
    return {};
  }
  std::vector<int> a_star = exact.a_star;
  std::sort(a_star.begin(), a_star.end());
  if (stats) {
    stats->feasible = true;
    stats->exact_nodes = exact.nodes_visited;
    stats->a_star = a_star;
  }

  std::vector<TrainingPair> pairs;
  EngineHooks hooks;
  hooks.on_pop = [&](const NodeState& node, const EngineView& view) {
    TrainingPair pair;
    pair.sample = extract_features(node, view, search.rel_gap, inst);
    pair.label = label_node(node, a_star);
    pair.level = node.level;
    pair.instance_seed = inst.config.seed;
    pair.include_set = node.include_set;
    pair.exclude_set = node.exclude_set;
    GateDecision decision = GateDecision::branch;
    if (policy && forward(*policy, pair.sample) < gate)
      decision = GateDecision::prune;
    pairs.push_back(std::move(pair));
    return decision;
  };
  BnbResult replay = run_bb(inst, search, &hooks);
  if (stats) stats->replay_nodes = replay.nodes_visited;
  return pairs;
}

void TrainerConfig::validate() const {
  instance_template.validate();
  if (batches <= 0 || instances_per_batch <= 0 || epochs <= 0 ||
      minibatch <= 0 || validation_instances <= 0 ||
      min_validation_pairs <= 0 ||
      max_validation_instances < validation_instances || embed_dim <= 0)
    throw ConfigError("trainer config: counts must be positive");
  if (!(perturb_rate > 0) || !(class_weight > 0) || !(step_size > 0))
    throw ConfigError("trainer config: rates must be positive");
  if (!(gate > 0 && gate < 1))
    throw ConfigError("trainer config: gate must lie in (0,1)");
}

namespace {

struct ValidationScore {
  double loss = std::numeric_limits<double>::infinity();
  long pairs = 0;
};

// Empirical mean weighted loss of the policy over replays it drives
// itself, on a deterministic stream of held-out instances.
ValidationScore validate_policy(const GnnParams& policy,
                                const TrainerConfig& cfg,
                                std::uint64_t val_seed_base) {
  double total = 0.0;
  long count = 0;
  std::mt19937_64 seeder(val_seed_base);
  int used = 0;
  while (used < cfg.max_validation_instances &&
         (used < cfg.validation_instances ||
          count < cfg.min_validation_pairs)) {
    InstanceConfig ic = cfg.instance_template;
    ic.seed = seeder();
    ProblemInstance inst = generate_instance(ic);
    ++used;
    CollectStats st;
    auto pairs = collect_data(inst, &policy, cfg.gate, cfg.search, &st);
    if (!st.feasible) continue;
    for (const auto& pr : pairs) {
      total += weighted_loss(forward(policy, pr.sample), pr.label, pr.level,
                             cfg.class_weight);
      ++count;
    }
  }
  ValidationScore score;
  score.pairs = count;
  if (count > 0) score.loss = total / count;
  return score;
}

}  // namespace

TrainResult train_online(const TrainerConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::uint64_t init_seed = rng();
  const std::uint64_t val_seed_base = rng();

  GnnParams theta = init_params(cfg.embed_dim, init_seed);
  const int n_params = theta.param_count();

  TrainResult result;
  std::vector<std::vector<TrainingPair>> pools;  // D_1 .. D_i
  long total_pairs = 0;

  auto record_snapshot = [&](int batch_index) {
    PolicySnapshot snap;
    snap.params = theta;
    snap.batch_index = batch_index;
    ValidationScore score = validate_policy(theta, cfg, val_seed_base);
    snap.validation_loss = score.loss;
    snap.validation_pairs = score.pairs;
    if (cfg.verbose)
      std::fprintf(stderr, "policy %d: validation loss %.6f over %ld pairs\n",
                   batch_index, score.loss, score.pairs);
    result.snapshots.push_back(std::move(snap));
  };

  std::exponential_distribution<double> exp_draw(cfg.perturb_rate);

  for (int i = 1; i <= cfg.batches; ++i) {
    record_snapshot(i);

    // Fresh objective tilt for this batch (recorded for audits).
    RVector psi(n_params);
    for (int j = 0; j < n_params; ++j) psi(j) = exp_draw(rng);
    result.perturbations.push_back(psi);

    // Collect batch i: unpruned on the first batch, driven by the
    // incumbent policy afterwards; infeasible draws are replaced.
    std::vector<TrainingPair> batch;
    int collected = 0;
    while (collected < cfg.instances_per_batch) {
      InstanceConfig ic = cfg.instance_template;
      ic.seed = rng();
      ProblemInstance inst = generate_instance(ic);
      CollectStats st;
      auto pairs = collect_data(inst, i == 1 ? nullptr : &theta, cfg.gate,
                                cfg.search, &st);
      if (!st.feasible) {
        ++result.instances_regenerated;
        continue;
      }
      ++collected;
      for (auto& pr : pairs) batch.push_back(std::move(pr));
    }
    if (!cfg.dataset_path.empty()) append_dataset(cfg.dataset_path, batch);
    total_pairs += static_cast<long>(batch.size());
    pools.push_back(std::move(batch));

    // Minimize the running-average weighted loss over D_1..D_i minus
    // psi' theta by Adam, warm-started at the incumbent, spectrally
    // projected after every step.
    std::vector<std::pair<int, int>> index;  // (pool, position)
    std::vector<double> coeff;               // 1 / (i * |D_t|)
    for (int t = 0; t < i; ++t)
      for (size_t p = 0; p < pools[t].size(); ++p) {
        index.emplace_back(t, static_cast<int>(p));
        coeff.push_back(1.0 / (static_cast<double>(i) * pools[t].size()));
      }
    const long pool_size = static_cast<long>(index.size());
    if (pool_size == 0) continue;

    RVector flat = theta.flatten();
    RVector m1 = RVector::Zero(n_params), m2 = RVector::Zero(n_params);
    long step = 0;
    std::vector<long> order(pool_size);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (long at = 0; at < pool_size; at += cfg.minibatch) {
        const long stop = std::min(pool_size, at + cfg.minibatch);
        RVector grad = -psi;
        const double scale =
            static_cast<double>(pool_size) / static_cast<double>(stop - at);
        double batch_loss = 0.0;
        for (long b = at; b < stop; ++b) {
          const auto& [t, p] = index[order[b]];
          const auto& pr = pools[t][p];
          GradientVector gv =
              backward(theta, pr.sample, pr.label,
                       pair_weight(pr.label, pr.level, cfg.class_weight));
          grad += scale * coeff[order[b]] * gv.grad.flatten();
          batch_loss += gv.loss;
        }
        if (!std::isfinite(batch_loss) || !grad.allFinite()) {
          if (!cfg.dataset_path.empty())
            save_params(theta, cfg.dataset_path + ".abort-params");
          throw SolverError("training diverged: non-finite loss at batch " +
                            std::to_string(i));
        }
        ++step;
        m1 = 0.9 * m1 + 0.1 * grad;
        m2 = 0.999 * m2 + 0.001 * grad.cwiseProduct(grad).eval();
        const double c1 = 1.0 - std::pow(0.9, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(0.999, static_cast<double>(step));
        flat -= cfg.step_size *
                ((m1 / c1).array() / ((m2 / c2).array().sqrt() + 1e-8))
                    .matrix();
        theta = GnnParams::unflatten(flat, cfg.embed_dim);
        project_params(theta);
        flat = theta.flatten();
      }
    }
  }

  record_snapshot(cfg.batches + 1);
  result.pairs_collected = total_pairs;
  result.best = result.snapshots[select_policy(result.snapshots)];
  return result;
}

int select_policy(const std::vector<PolicySnapshot>& snapshots) {
  int best = -1;
  for (size_t k = 0; k < snapshots.size(); ++k) {
    if (snapshots[k].validation_pairs == 0) continue;
    if (best < 0 ||
        snapshots[k].validation_loss < snapshots[best].validation_loss ||
        (snapshots[k].validation_loss == snapshots[best].validation_loss &&
         snapshots[k].batch_index < snapshots[best].batch_index))
      best = static_cast<int>(k);
  }
  if (best < 0) throw UsageError("select_policy: no validated snapshot");
  return best;
}

void append_dataset(const std::string& path,
                    const std::vector<TrainingPair>& pairs) {
  std::ofstream os(path, std::ios::app);
  if (!os) throw ParseError("cannot open dataset for append: " + path);
  os.precision(17);
  for (const auto& pr : pairs) {
    os << "pair " << pr.instance_seed << ' ' << pr.level << ' ' << pr.label
       << ' ' << pr.include_set.size();
    for (int v : pr.include_set) os << ' ' << v;
    os << ' ' << pr.exclude_set.size();
    for (int v : pr.exclude_set) os << ' ' << v;
    os << ' ' << pr.sample.n_antennas << ' ' << pr.sample.n_users;
    auto dump = [&os](const RMatrix& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) os << ' ' << m(r, c);
    };
    dump(pr.sample.antenna_features);
    dump(pr.sample.user_features);
    dump(pr.sample.edge_features);
    os << '\n';
  }
  if (!os) throw ParseError("short write to dataset: " + path);
}

std::vector<TrainingPair> load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open dataset: " + path);
  std::vector<TrainingPair> pairs;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "pair")
      throw ParseError("dataset " + path + ": bad record at line " +
                       std::to_string(lineno));
    TrainingPair pr;
    size_t na = 0, nb = 0;
    ss >> pr.instance_seed >> pr.level >> pr.label >> na;
    pr.include_set.resize(na);
    for (auto& v : pr.include_set) ss >> v;
    ss >> nb;
    pr.exclude_set.resize(nb);
    for (auto& v : pr.exclude_set) ss >> v;
    ss >> pr.sample.n_antennas >> pr.sample.n_users;
    if (!ss || pr.sample.n_antennas <= 0 || pr.sample.n_users <= 0)
      throw ParseError("dataset " + path + ": bad header at line " +
                       std::to_string(lineno));
    const int n = pr.sample.n_antennas, m = pr.sample.n_users;
    pr.sample.antenna_features.resize(n, kAntennaFeatureDim);
    pr.sample.user_features.resize(m, kUserFeatureDim);
    pr.sample.edge_features.resize(static_cast<Eigen::Index>(n) * m,
                                   kEdgeFeatureDim);
    auto slurp = [&ss](RMatrix& mat) {
      for (Eigen::Index r = 0; r < mat.rows(); ++r)
        for (Eigen::Index c = 0; c < mat.cols(); ++c) ss >> mat(r, c);
    };
    slurp(pr.sample.antenna_features);
    slurp(pr.sample.user_features);
    slurp(pr.sample.edge_features);
    if (!ss)
      throw ParseError("dataset " + path + ": truncated record at line " +
                       std::to_string(lineno));
    pairs.push_back(std::move(pr));
  }
  return pairs;
}

}  // namespace beamselect
