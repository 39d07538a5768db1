#include <doctest.h>

#include <random>

#include "beamselect/barrier_solver.hpp"
#include "beamselect/cones.hpp"
#include "beamselect/ipm_solver.hpp"

using namespace beamselect;

namespace {

const std::vector<ConeSpec> kMixed = {
    {ConeKind::nonneg, 3}, {ConeKind::soc, 4}, {ConeKind::psd, 3}};

Eigen::VectorXd random_interior(const std::vector<ConeSpec>& cones,
                                std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const Eigen::VectorXd e = cone_identity(cones);
  // Rejection-sample a perturbation small enough to stay strictly inside.
  while (true) {
    Eigen::VectorXd v(e.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 0.15 * g(rng);
    if (in_cone_interior(cones, e + v, 0.0)) return e + v;
  }
}

}  // namespace

TEST_CASE("svec/smat preserve the symmetric inner product") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(4, 4), b(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a(i, j) = g(rng);
      b(i, j) = g(rng);
    }
  a = ((a + a.transpose()) / 2).eval();
  b = ((b + b.transpose()) / 2).eval();
  CHECK(svec(a).dot(svec(b)) ==
        doctest::Approx((a * b).trace()).epsilon(1e-12));
  CHECK((smat(svec(a)) - a).norm() <= 1e-14 * a.norm());
}

TEST_CASE("scaling-point identities hold on random interior pairs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd s = random_interior(kMixed, rng);
    Eigen::VectorXd z = random_interior(kMixed, rng);
    REQUIRE(in_cone_interior(kMixed, s, 0.0));
    REQUIRE(in_cone_interior(kMixed, z, 0.0));
    NTScaling w(kMixed, s, z);

    // The scaled point is reached from both sides: lambda = Wz = W^{-T}s.
    CHECK((w.apply(z) - w.lambda()).norm() <= 1e-10 * w.lambda().norm());
    CHECK((w.apply_inv_transpose(s) - w.lambda()).norm() <=
          1e-10 * w.lambda().norm());
    // Duality gap is preserved: s'z = lambda'lambda.
    CHECK(s.dot(z) ==
          doctest::Approx(w.lambda().squaredNorm()).epsilon(1e-10));
    // Inverses really invert, in both transpose flavors.
    Eigen::VectorXd v = random_interior(kMixed, rng);
    CHECK((w.apply_inv(w.apply(v)) - v).norm() <= 1e-10 * v.norm());
    CHECK((w.apply_inv_transpose(w.apply_transpose(v)) - v).norm() <=
          1e-10 * v.norm());
  }
}

TEST_CASE("jordan product and solve are mutually inverse at lambda") {
  std::mt19937_64 rng(23);
  Eigen::VectorXd s = random_interior(kMixed, rng);
  Eigen::VectorXd z = random_interior(kMixed, rng);
  NTScaling w(kMixed, s, z);
  Eigen::VectorXd v = random_interior(kMixed, rng);
  Eigen::VectorXd u = jordan_solve(kMixed, w.lambda(), v);
  CHECK((jordan_product(kMixed, w.lambda(), u) - v).norm() <=
        1e-10 * v.norm());
}

TEST_CASE("step to boundary lands exactly on the boundary") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = random_interior(kMixed, rng);
    Eigen::VectorXd dx(x.size());
    for (Eigen::Index i = 0; i < dx.size(); ++i) dx(i) = g(rng);
    double a = step_to_boundary(kMixed, x, dx);
    if (a > 1e20) continue;  // direction never leaves the cone
    CHECK(in_cone_interior(kMixed, x + 0.999 * a * dx, 0.0));
    CHECK_FALSE(in_cone_interior(kMixed, x + 1.001 * a * dx, 0.0));
  }
}

TEST_CASE("tiny linear program solves to its known optimum") {
  // min x subject to x >= 1.
  ConeProgramData p;
  p.c = Eigen::VectorXd::Ones(1);
  p.g = -Eigen::MatrixXd::Ones(1, 1);
  p.h = -Eigen::VectorXd::Ones(1);
  p.cones = {{ConeKind::nonneg, 1}};
  auto sol = solve_cone_program(p);
  REQUIRE(sol.status == IpmStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("tiny second-order program solves to sqrt(5)") {
  // min t subject to ||(1,2)|| <= t.
  ConeProgramData p;
  p.c = Eigen::VectorXd::Ones(1);
  p.g = Eigen::MatrixXd::Zero(3, 1);
  p.g(0, 0) = -1;
  p.h = Eigen::VectorXd::Zero(3);
  p.h(1) = 1;
  p.h(2) = 2;
  p.cones = {{ConeKind::soc, 3}};
  auto sol = solve_cone_program(p);
  REQUIRE(sol.status == IpmStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-7));
  auto bar = solve_cone_program_barrier(p);
  REQUIRE(bar.status == IpmStatus::optimal);
  CHECK(bar.x(0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-5));
}

TEST_CASE("tiny semidefinite program solves to trace 2") {
  // min tr(X) subject to X >= I, X symmetric 2x2.
  ConeProgramData p;
  p.c = Eigen::VectorXd::Zero(3);
  p.c(0) = 1;
  p.c(2) = 1;
  p.g = -Eigen::MatrixXd::Identity(3, 3);
  p.h = -svec(Eigen::MatrixXd::Identity(2, 2));
  p.cones = {{ConeKind::psd, 2}};
  auto sol = solve_cone_program(p);
  REQUIRE(sol.status == IpmStatus::optimal);
  CHECK(sol.primal_obj == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("primal infeasibility is certified") {
  // x >= 1 and x <= 0 simultaneously.
  ConeProgramData p;
  p.c = Eigen::VectorXd::Ones(1);
  p.g = Eigen::MatrixXd::Zero(2, 1);
  p.g(0, 0) = -1;  // -x + s1 = -1  ->  x >= 1
  p.g(1, 0) = 1;   //  x + s2 = 0   ->  x <= 0
  p.h = Eigen::VectorXd::Zero(2);
  p.h(0) = -1;
  p.cones = {{ConeKind::nonneg, 2}};
  auto sol = solve_cone_program(p);
  CHECK(sol.status == IpmStatus::primal_infeasible);
}

TEST_CASE("dual infeasibility (unbounded primal) is certified") {
  // min -x subject to x >= 0: unbounded below.
  ConeProgramData p;
  p.c = -Eigen::VectorXd::Ones(1);
  p.g = -Eigen::MatrixXd::Ones(1, 1);
  p.h = Eigen::VectorXd::Zero(1);
  p.cones = {{ConeKind::nonneg, 1}};
  auto sol = solve_cone_program(p);
  CHECK(sol.status == IpmStatus::dual_infeasible);
}

TEST_CASE("complex PSD embedding preserves definiteness") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  CMatrix a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = {g(rng), g(rng)};
  CMatrix herm = a * a.adjoint();  // PSD by construction
  Eigen::MatrixXd emb = real_embed(herm);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(emb);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  CHECK((emb - emb.transpose()).norm() <= 1e-12);
}
