#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "beamselect/bnb.hpp"

using namespace beamselect;

namespace {

ProblemInstance make(int n, int m, int l, double gamma, double sigma2,
                     double eps, std::uint64_t seed) {
  auto cfg = InstanceConfig::uniform(n, m, l, gamma, sigma2, eps, seed);
  return generate_instance(cfg);
}

}  // namespace

TEST_CASE("binomial coefficients and overflow guard") {
  CHECK(binomial(12, 8) == 495ULL);
  CHECK(binomial(8, 4) == 70ULL);
  CHECK(binomial(5, 0) == 1ULL);
  CHECK(binomial(5, 5) == 1ULL);
  CHECK_THROWS_AS(binomial(200, 100), std::overflow_error);
}

TEST_CASE("worst-case solve counts match their pinned values") {
  CHECK(q_compute(12, 8) == 660ULL);
  CHECK(q_compute_alt(12, 8) == 989ULL);
  CHECK(q_compute(8, 4) == 105ULL);
  CHECK(q_compute_alt(8, 4) == 139ULL);
  // A trivial tree: one undecided antenna.
  CHECK(q_compute(1, 1) == 1ULL);
}

TEST_CASE("observed solves never exceed the worst-case count") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5, 6}) {
    auto inst = make(7, 3, 3, 2.0, 1.0, 0.0, seed);
    BnbConfig cfg;
    auto direct = run_bb(inst, cfg);
    REQUIRE(direct.status == BnbResult::Status::optimal);
    CHECK(static_cast<unsigned long long>(direct.conic_solve_count) <=
          q_compute(7, 3));
    cfg.formulation = BnbFormulation::z_aux;
    auto aux = run_bb_alt(inst, cfg);
    REQUIRE(aux.status == BnbResult::Status::optimal);
    CHECK(static_cast<unsigned long long>(aux.conic_solve_count) <=
          q_compute_alt(7, 3));
  }
}

TEST_CASE("both formulations reproduce exhaustive enumeration") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5, 6}) {
    auto inst = make(6, 3, 3, 2.0, 1.0, 0.0, 100 + seed);
    BnbConfig cfg;
    cfg.rel_gap = 1e-6;
    auto direct = run_bb(inst, cfg);
    auto aux = run_bb_alt(inst, cfg);
    auto exact = run_exhaustive(inst);
    REQUIRE(direct.status == BnbResult::Status::optimal);
    REQUIRE(aux.status == BnbResult::Status::optimal);
    REQUIRE(exact.status == BnbResult::Status::optimal);
    CHECK(direct.objective ==
          doctest::Approx(exact.objective).epsilon(1e-5));
    CHECK(aux.objective == doctest::Approx(exact.objective).epsilon(1e-5));
    CHECK(direct.a_star == exact.a_star);
  }
}

TEST_CASE("bound traces are monotone and consistent") {
  auto inst = make(8, 4, 4, 1.0, 1.0, 0.0, 21);
  BnbConfig cfg;
  auto res = run_bb(inst, cfg);
  REQUIRE(res.status == BnbResult::Status::optimal);
  REQUIRE(res.bound_trace.size() >= 2);
  for (std::size_t i = 0; i < res.bound_trace.size(); ++i) {
    const auto& p = res.bound_trace[i];
    CHECK(p.lower <= p.upper + 1e-12);
    if (i > 0) {
      CHECK(p.lower >= res.bound_trace[i - 1].lower - 1e-12);
      CHECK(p.upper <= res.bound_trace[i - 1].upper + 1e-12);
    }
  }
  const auto& last = res.bound_trace.back();
  CHECK(last.upper == doctest::Approx(res.objective).epsilon(1e-9));
  CHECK((last.upper - last.lower) <= cfg.rel_gap * std::abs(last.upper) +
                                         1e-12);
}

TEST_CASE("disabling right-child reuse changes cost, not the answer") {
  auto inst = make(8, 3, 4, 2.0, 1.0, 0.0, 33);
  BnbConfig on, off;
  on.reuse_right_child = true;
  off.reuse_right_child = false;
  auto a = run_bb(inst, on);
  auto b = run_bb(inst, off);
  REQUIRE(a.status == BnbResult::Status::optimal);
  REQUIRE(b.status == BnbResult::Status::optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
  CHECK(a.a_star == b.a_star);
  CHECK(a.conic_solve_count <= b.conic_solve_count);
}

TEST_CASE("node cap reports an honest truncation") {
  auto inst = make(8, 4, 4, 1.0, 1.0, 0.0, 2);
  BnbConfig cfg;
  cfg.max_nodes = 1;
  cfg.rel_gap = 1e-10;
  auto res = run_bb(inst, cfg);
  CHECK(res.status == BnbResult::Status::node_cap);
}

TEST_CASE("single-user selection keeps the strongest antennas") {
  // With one user the optimum selects the L largest-magnitude channel
  // entries and the power is gamma*sigma2 / (sum of their squares).
  auto inst = make(7, 1, 3, 2.0, 1.5, 0.0, 10);
  BnbConfig cfg;
  cfg.rel_gap = 1e-7;
  auto res = run_bb(inst, cfg);
  REQUIRE(res.status == BnbResult::Status::optimal);
  std::vector<int> order(7);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::norm(inst.channel(a, 0)) > std::norm(inst.channel(b, 0));
  });
  std::vector<int> best(order.begin(), order.begin() + 3);
  std::sort(best.begin(), best.end());
  CHECK(res.a_star == best);
  double top = 0.0;
  for (int i : best) top += std::norm(inst.channel(i, 0));
  CHECK(res.objective == doctest::Approx(2.0 * 1.5 / top).epsilon(1e-5));
}

TEST_CASE("robust search agrees with robust enumeration") {
  auto inst = make(6, 2, 3, 1.5, 1.0, 0.05, 14);
  inst.config.csi_mode = CsiMode::robust;
  BnbConfig cfg;
  auto res = run_bb(inst, cfg);
  auto exact = run_exhaustive(inst);
  REQUIRE(res.status == BnbResult::Status::optimal);
  REQUIRE(exact.status == BnbResult::Status::optimal);
  CHECK(res.objective == doctest::Approx(exact.objective).epsilon(1e-4));
}

TEST_CASE("node selection follows lb, then level, then id") {
  std::vector<NodeState> open(3);
  open[0].lb = 2.0;
  open[0].level = 0;
  open[0].id = 0;
  open[1].lb = 1.0;
  open[1].level = 2;
  open[1].id = 5;
  open[2].lb = 1.0;
  open[2].level = 1;
  open[2].id = 7;
  CHECK(select_node(open) == 2);
  open[2].level = 2;
  CHECK(select_node(open) == 1);  // equal lb and level: smaller id
  open[1].is_leaf = true;
  open[2].is_leaf = true;
  CHECK(select_node(open) == 0);
  open[0].is_leaf = true;
  CHECK(select_node(open) == -1);
}

TEST_CASE("branching picks the heaviest undecided row") {
  auto inst = make(5, 2, 2, 2.0, 1.0, 0.0, 8);
  NodeState node;
  node.row_powers_lb = RVector::Zero(5);
  node.row_powers_lb << 0.1, 0.9, 0.9, 0.3, 0.2;
  CHECK(select_branch_antenna(node, inst) == 1);  // tie: smallest index
  node.include_set = {1};
  CHECK(select_branch_antenna(node, inst) == 2);
  node.exclude_set = {2};
  CHECK(select_branch_antenna(node, inst) == 3);
}

TEST_CASE("children are auto-completed at the cardinality boundary") {
  auto inst = make(4, 2, 2, 2.0, 1.0, 0.0, 8);
  NodeState node;
  node.include_set = {0};
  node.exclude_set = {3};
  node.level = 2;
  auto [left, right] = branch(node, 1, inst, 10);
  // Left excludes antenna 1: only {0,2} can remain, so it is a leaf.
  CHECK(left.exclude_set == std::vector<int>{1, 3});
  CHECK(left.include_set == std::vector<int>{0, 2});
  CHECK(left.is_leaf);
  // Right includes antenna 1: the budget of 2 is reached, so antenna 2
  // is forced off.
  CHECK(right.include_set == std::vector<int>{0, 1});
  CHECK(right.exclude_set == std::vector<int>{2, 3});
  CHECK(right.is_leaf);
  CHECK(left.id == 10);
  CHECK(right.id == 11);
  CHECK(left.parent == node.id);
}

TEST_CASE("visited and solve counters stay within the expected bands") {
  auto inst = make(8, 4, 4, 1.0, 1.0, 0.0, 4);
  BnbConfig cfg;
  auto res = run_bb(inst, cfg);
  REQUIRE(res.status == BnbResult::Status::optimal);
  CHECK(res.nodes_visited >= 1);
  CHECK(res.conic_solve_count >= res.nodes_visited);
  CHECK(static_cast<unsigned long long>(res.conic_solve_count) <=
        q_compute(8, 4));
}
