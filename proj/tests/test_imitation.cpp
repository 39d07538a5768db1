#include <doctest.h>

#include <algorithm>

#include "beamselect/imitation.hpp"

using namespace beamselect;

TEST_CASE("pair weights and weighted loss follow the reweighting rule") {
  // weight = (q*1[y=1] + 1)/max(level,1); loss = weight * cross-entropy.
  CHECK(pair_weight(0, 1, 11.0) == 1.0);
  CHECK(pair_weight(1, 1, 11.0) == 12.0);
  CHECK(pair_weight(1, 4, 11.0) == 3.0);
  CHECK(pair_weight(0, 0, 11.0) == 1.0);  // root level clamps to 1
  CHECK(weighted_loss(0.5, 0, 1, 11.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(weighted_loss(0.5, 1, 1, 11.0) ==
        doctest::Approx(12.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(weighted_loss(0.5, 1, 4, 11.0) ==
        doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
  // Probability clamping keeps the loss finite at the extremes.
  CHECK(std::isfinite(weighted_loss(0.0, 1, 1, 11.0)));
  CHECK(std::isfinite(weighted_loss(1.0, 0, 1, 11.0)));
}

TEST_CASE("node labels reflect containment in the optimal set") {
  std::vector<int> a_star = {1, 3, 4};
  NodeState node;
  node.include_set = {1, 3};
  node.exclude_set = {0};
  CHECK(label_node(node, a_star) == 1);
  node.exclude_set = {0, 4};  // excludes an optimal antenna
  CHECK(label_node(node, a_star) == 0);
  node.exclude_set = {};
  node.include_set = {1, 2};  // includes a non-optimal antenna
  CHECK(label_node(node, a_star) == 0);
  node.include_set = {};
  CHECK(label_node(node, a_star) == 1);  // the root is always on the path
}

TEST_CASE("unpruned collection emits one pair per expanded node") {
  auto cfg = InstanceConfig::uniform(6, 3, 3, 2.0, 1.0, 0.0, 3);
  auto inst = generate_instance(cfg);
  BnbConfig bc;
  bc.rel_gap = 1e-6;
  auto exact = run_bb(inst, bc);
  REQUIRE(exact.status == BnbResult::Status::optimal);

  CollectStats st;
  auto pairs = collect_data(inst, nullptr, 0.5, bc, &st);
  CHECK(st.feasible);
  CHECK(static_cast<long>(pairs.size()) == exact.nodes_visited);
  CHECK(st.replay_nodes == exact.nodes_visited);
  CHECK(st.a_star == exact.a_star);

  // Label audit: the positives are exactly the nodes whose partial
  // decisions are consistent with the optimal set, and at least the root
  // is positive.
  std::vector<int> astar = exact.a_star;
  std::sort(astar.begin(), astar.end());
  long ones = 0;
  for (const auto& p : pairs) {
    NodeState nd;
    nd.include_set = p.include_set;
    nd.exclude_set = p.exclude_set;
    CHECK(p.label == label_node(nd, astar));
    ones += p.label;
    p.sample.validate();
    CHECK(p.sample.n_antennas == 6);
    CHECK(p.sample.n_users == 3);
    CHECK(p.level == static_cast<int>(p.include_set.size() +
                                      p.exclude_set.size()));
  }
  CHECK(ones >= 1);
  CHECK(ones < static_cast<long>(pairs.size()));
}

TEST_CASE("infeasible instances are skipped with empty output") {
  auto cfg = InstanceConfig::uniform(1, 2, 1, 1e9, 1.0, 0.0, 5);
  auto inst = generate_instance(cfg);
  BnbConfig bc;
  CollectStats st;
  auto pairs = collect_data(inst, nullptr, 0.5, bc, &st);
  CHECK(pairs.empty());
  CHECK_FALSE(st.feasible);
}

TEST_CASE("dataset log round-trips bit for bit") {
  auto cfg = InstanceConfig::uniform(5, 2, 2, 2.0, 1.0, 0.0, 9);
  auto inst = generate_instance(cfg);
  BnbConfig bc;
  auto pairs = collect_data(inst, nullptr, 0.5, bc);
  REQUIRE_FALSE(pairs.empty());
  const std::string path = "imitation_pairs_roundtrip.log";
  std::remove(path.c_str());
  append_dataset(path, pairs);
  auto back = load_dataset(path);
  REQUIRE(back.size() == pairs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].label == pairs[i].label);
    CHECK(back[i].level == pairs[i].level);
    CHECK(back[i].include_set == pairs[i].include_set);
    CHECK(back[i].exclude_set == pairs[i].exclude_set);
    CHECK((back[i].sample.antenna_features -
           pairs[i].sample.antenna_features).norm() == 0.0);
    CHECK((back[i].sample.user_features -
           pairs[i].sample.user_features).norm() == 0.0);
    CHECK((back[i].sample.edge_features -
           pairs[i].sample.edge_features).norm() == 0.0);
  }
  // Append really appends.
  append_dataset(path, pairs);
  CHECK(load_dataset(path).size() == 2 * pairs.size());
}

TEST_CASE("policy selection prefers minimal loss, then earlier batches") {
  std::vector<PolicySnapshot> snaps(3);
  snaps[0].batch_index = 1;
  snaps[0].validation_loss = 2.0;
  snaps[0].validation_pairs = 10;
  snaps[1].batch_index = 2;
  snaps[1].validation_loss = 1.0;
  snaps[1].validation_pairs = 10;
  snaps[2].batch_index = 3;
  snaps[2].validation_loss = 1.0;
  snaps[2].validation_pairs = 10;
  CHECK(select_policy(snaps) == 1);
  snaps[1].validation_loss = 3.0;
  CHECK(select_policy(snaps) == 2);
  for (auto& s : snaps) s.validation_pairs = 0;
  CHECK_THROWS_AS(select_policy(snaps), UsageError);
}

TEST_CASE("online training runs deterministically end to end") {
  TrainerConfig tc;
  tc.instance_template = InstanceConfig::uniform(6, 2, 3, 2.0, 1.0, 0.0, 0);
  tc.search.rel_gap = 1e-6;
  tc.batches = 2;
  tc.instances_per_batch = 3;
  tc.epochs = 2;
  tc.minibatch = 32;
  tc.validation_instances = 3;
  tc.min_validation_pairs = 10;
  tc.max_validation_instances = 10;
  tc.embed_dim = 4;
  tc.seed = 5;
  auto r1 = train_online(tc);
  auto r2 = train_online(tc);
  CHECK(r1.pairs_collected > 0);
  CHECK(r1.snapshots.size() == 3);  // one per batch + the final policy
  CHECK(r1.perturbations.size() == 2);
  for (const auto& psi : r1.perturbations) {
    CHECK(psi.size() == r1.best.params.flatten().size());
    CHECK(psi.minCoeff() >= 0.0);  // exponential tilts are nonnegative
  }
  CHECK((r1.best.params.flatten() - r2.best.params.flatten()).norm() == 0.0);
  CHECK(std::isfinite(r1.best.validation_loss));
  CHECK(r1.best.validation_pairs >= tc.min_validation_pairs);
  // The selected snapshot really attains the minimum validation loss.
  for (const auto& s : r1.snapshots)
    CHECK(r1.best.validation_loss <= s.validation_loss + 1e-15);
}

TEST_CASE("trainer configuration is validated") {
  TrainerConfig tc;
  tc.instance_template = InstanceConfig::uniform(6, 2, 3, 2.0, 1.0, 0.0, 0);
  CHECK_NOTHROW(tc.validate());
  tc.batches = 0;
  CHECK_THROWS_AS(tc.validate(), ConfigError);
  tc.batches = 2;
  tc.embed_dim = 0;
  CHECK_THROWS_AS(tc.validate(), ConfigError);
  tc.embed_dim = 4;
  tc.gate = 1.5;
  CHECK_THROWS_AS(tc.validate(), ConfigError);
}
