#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "beamselect/harness.hpp"

using namespace beamselect;

namespace {

const char* kTinySpec = R"(
# demo sweep
cell tiny
  n 6
  m 2
  l 3
  gamma 1.0
  sigma2 1.0
  trials 3
  seed 11
  rel_gap 1e-6
  methods exhaustive bb greedy
  reference exhaustive
end
)";

}  // namespace

TEST_CASE("scalar metrics") {
  CHECK(ogap(2.2, 2.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(ogap(2.0, 2.0) == 0.0);
  CHECK(speedup(10.0, 5.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("experiment specs parse their keys and reject malformed input") {
  std::istringstream is(kTinySpec);
  auto cells = parse_experiment_spec(is);
  REQUIRE(cells.size() == 1);
  const auto& c = cells[0];
  CHECK(c.name == "tiny");
  CHECK(c.base.n_antennas == 6);
  CHECK(c.base.n_users == 2);
  CHECK(c.base.budget == 3);
  CHECK(c.trials == 3);
  CHECK(c.seed_base == 11);
  CHECK(c.rel_gap == 1e-6);
  CHECK(c.methods == std::vector<std::string>{"exhaustive", "bb", "greedy"});
  CHECK(c.reference == "exhaustive");

  std::istringstream bad1("cell x\n n 4\nend\n");  // missing m/l
  CHECK_THROWS_AS(parse_experiment_spec(bad1), ConfigError);
  std::istringstream bad2(
      "cell x\n n 4\n m 2\n l 2\n methods warp\n reference warp\nend\n");
  CHECK_THROWS_AS(parse_experiment_spec(bad2), ConfigError);
  std::istringstream bad3(
      "cell x\n n 4\n m 2\n l 2\n methods bb greedy\n reference exhaustive\n"
      "end\n");  // reference not among the methods
  CHECK_THROWS_AS(parse_experiment_spec(bad3), ConfigError);
  std::istringstream bad4("cell x\n warp 9\nend\n");  // unknown key
  CHECK_THROWS_AS(parse_experiment_spec(bad4), ParseError);
  std::istringstream bad5("cell x\n n 4\n");  // unterminated block
  CHECK_THROWS_AS(parse_experiment_spec(bad5), ParseError);
  CHECK_THROWS_AS(load_experiment_spec("no_such_spec_file"), ParseError);
}

TEST_CASE("a small sweep runs, persists, and replays identically") {
  std::istringstream is(kTinySpec);
  auto cells = parse_experiment_spec(is);
  auto recs = run_experiment(cells);
  REQUIRE(recs.size() == 9);  // 3 trials x 3 methods

  // The reference method defines a zero gap for itself and nonnegative
  // gaps for everyone else.
  for (const auto& r : recs) {
    CHECK(r.feasible);
    CHECK(r.status == "optimal");
    if (r.method == "exhaustive")
      CHECK(r.ogap_pct == doctest::Approx(0.0).epsilon(1e-9));
    else
      CHECK(r.ogap_pct >= -1e-6);
    CHECK(r.wall_time >= 0.0);
  }

  const std::string path = "harness_records_roundtrip.csv";
  write_records_csv(recs, path);
  auto back = read_records_csv(path);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].cell == recs[i].cell);
    CHECK(back[i].method == recs[i].method);
    CHECK(back[i].seed == recs[i].seed);
    CHECK(back[i].objective == doctest::Approx(recs[i].objective).epsilon(1e-14));
    CHECK(back[i].conic_solves == recs[i].conic_solves);
    CHECK(back[i].feasible == recs[i].feasible);
  }
  // Pinned header so downstream scripts can rely on the column order.
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header ==
        "cell,seed,method,n,m,l,status,feasible,objective,ogap_pct,"
        "conic_solves,nodes_visited,nodes_pruned,classifier_calls,"
        "optimal_flag,wall_time");

  // Replays are bitwise deterministic apart from wall time.
  auto recs2 = run_experiment(cells);
  REQUIRE(recs2.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs2[i].objective == recs[i].objective);
    CHECK(recs2[i].conic_solves == recs[i].conic_solves);
    CHECK(recs2[i].nodes_visited == recs[i].nodes_visited);
  }
}

TEST_CASE("summaries recompute from the per-run records") {
  std::istringstream is(kTinySpec);
  auto cells = parse_experiment_spec(is);
  auto recs = run_experiment(cells);
  auto rows = summarize(recs);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    double sum_obj = 0, sum_gap = 0, sum_solves = 0;
    int k = 0;
    for (const auto& r : recs) {
      if (r.cell != row.cell || r.method != row.method || !r.feasible)
        continue;
      ++k;
      sum_obj += r.objective;
      sum_gap += r.ogap_pct;
      sum_solves += r.conic_solves;
    }
    REQUIRE(k == row.feasible_runs);
    CHECK(row.mean_objective == doctest::Approx(sum_obj / k).epsilon(1e-12));
    CHECK(row.mean_ogap == doctest::Approx(sum_gap / k).epsilon(1e-12));
    CHECK(row.mean_solves ==
          doctest::Approx(sum_solves / k).epsilon(1e-12));
    // Standard error over k samples of the gap column.
    double var = 0;
    for (const auto& r : recs) {
      if (r.cell != row.cell || r.method != row.method || !r.feasible)
        continue;
      var += (r.ogap_pct - sum_gap / k) * (r.ogap_pct - sum_gap / k);
    }
    const double se = k > 1 ? std::sqrt(var / (k - 1) / k) : 0.0;
    CHECK(row.stderr_ogap == doctest::Approx(se).epsilon(1e-9));
  }
  std::ostringstream report;
  render_report(recs, report);
  CHECK(report.str().find("tiny") != std::string::npos);
  CHECK(report.str().find("greedy") != std::string::npos);
}

TEST_CASE("bound traces are written when a trace directory is given") {
  std::istringstream is(
      "cell tr\n n 6\n m 2\n l 3\n gamma 1.0\n sigma2 1.0\n trials 1\n"
      " seed 4\n methods bb\n reference bb\nend\n");
  auto cells = parse_experiment_spec(is);
  auto recs = run_experiment(cells, ".");
  REQUIRE(recs.size() == 1);
  std::ifstream t("tr-bb-4.trace");
  REQUIRE(t.good());
  std::string line;
  std::getline(t, line);
  CHECK(line.find("iteration") != std::string::npos);
  int rows = 0;
  double prev_lo = -1e300, prev_hi = 1e300;
  long it;
  double lo, hi;
  while (t >> it >> lo >> hi) {
    ++rows;
    CHECK(lo <= hi + 1e-12);
    CHECK(lo >= prev_lo - 1e-12);
    CHECK(hi <= prev_hi + 1e-12);
    prev_lo = lo;
    prev_hi = hi;
  }
  CHECK(rows >= 1);
}
