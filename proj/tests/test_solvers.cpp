#include <cmath>

#include "doctest.h"
#include "l12/oracles.hpp"
#include "l12/reduction.hpp"
#include "l12/solvers.hpp"

using namespace l12;

namespace {

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + 1e-12 * std::max(1.0, std::abs(v[i - 1]))) return false;
  }
  return true;
}

CandidatePoint pattern(const PartitionInstance& S, const std::vector<bool>& assign, double c) {
  Vector u = Vector::Zero(static_cast<Eigen::Index>(S.m()));
  Vector v = u;
  for (std::size_t i = 0; i < S.m(); ++i) (assign[i] ? u : v)[static_cast<Eigen::Index>(i)] = c;
  return CandidatePoint::from_uv(u, v);
}

}  // namespace

TEST_CASE("solver options validation") {
  SolverOptions o;
  CHECK_NOTHROW(o.validate());
  o.n_starts = 0;
  CHECK_THROWS(o.validate());
  o = {};
  o.stop_tol = 0;
  CHECK_THROWS(o.validate());
  o = {};
  o.penalty_schedule = {10, 1};
  CHECK_THROWS(o.validate());
  o.penalty_schedule = {};
  CHECK_THROWS(o.validate());
  CHECK(parse_init_strategy(to_string(InitStrategy::RandomBox)) == InitStrategy::RandomBox);
  CHECK_THROWS(parse_init_strategy("warm"));
}

TEST_CASE("gram spectral norm") {
  const Matrix A{{3, 0}, {0, 1}};
  const double L = gram_spectral_norm(A);
  CHECK(L >= 9.0);
  CHECK(L <= 9.0 * 1.02);
}

TEST_CASE("DCA from a balanced pattern") {
  const PartitionInstance S({1, 1});
  const auto inst = build_instance(S, ReductionParams::nup(1.0));
  const double c = pattern_magnitude(2, 1.0);
  const auto r = dca_solve(inst, pattern(S, {true, false}, c));
  CHECK(r.best_value <= 0.5428932188134525 + 1e-8);
  CHECK(non_increasing(r.objective_trajectory));
  CHECK(criticality_residual(inst, pattern(S, {true, false}, c)) <= 1e-10);
}

TEST_CASE("DCA from zero") {
  const auto inst = build_instance(PartitionInstance({3, 1, 2}), ReductionParams::up(0.8));
  const auto r = dca_solve(inst, CandidatePoint(Vector::Zero(6)));
  CHECK(non_increasing(r.objective_trajectory));
  CHECK(r.best_value < 3.0);
}

TEST_CASE("DCA on a single-element multiset") {
  const PartitionInstance S({0});
  const auto inst = build_instance(S, ReductionParams::nup(1.0));
  SolverOptions o;
  o.n_starts = 1;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto r = dca_solve(inst, initial_point(inst, InitStrategy::RandomBox, 3, i), o);
    CHECK(std::abs(r.best_value) < 1e-8);
    const Vector& x = r.best_point.x();
    CHECK(std::abs(std::max(x[0], x[1]) - 1.0) < 1e-4);
    CHECK(std::abs(std::min(x[0], x[1])) < 1e-4);
  }
}

TEST_CASE("DCA on generic least squares") {
  SUBCASE("one variable") {
    const auto inst = ProblemInstance::generic(Matrix{{2.0}}, Vector{{1.0}}, std::nullopt, 0.7, false);
    const auto r = dca_solve(inst, CandidatePoint(Vector{{3.0}}));
    CHECK(std::abs(r.best_point[0] - 0.5) < 1e-8);
  }
  SUBCASE("identity") {
    const auto inst = ProblemInstance::generic(Matrix::Identity(2, 2), Vector{{1.0, 0.0}},
                                               std::nullopt, 1.0, false);
    const auto r = dca_solve(inst, CandidatePoint(Vector{{0.8, 0.3}}));
    CHECK(r.best_value < 1e-10);
    CHECK((r.best_point.x() - Vector{{1.0, 0.0}}).norm() < 1e-5);
  }
}

TEST_CASE("penalty solver") {
  SUBCASE("NCP {1,1}") {
    const auto inst = build_instance(PartitionInstance({1, 1}), ReductionParams::ncp(1.0));
    SolverOptions o;
    o.n_starts = 10;
    const auto r = multi_start_solve(inst, o);
    CHECK(std::abs(r.best_value - (2 - std::sqrt(2.0))) < 1e-4);
    CHECK(r.feasibility.equality_residual <= 1e-6);
    CHECK(r.criticality_residual <= 1e-6);
  }
  SUBCASE("CP {1}") {
    const auto inst = build_instance(PartitionInstance({1}), ReductionParams::cp(1.0));
    SolverOptions o;
    o.n_starts = 10;
    o.init_strategy = InitStrategy::RandomBox;
    const auto r = multi_start_solve(inst, o);
    CHECK(r.best_value <= 1 - std::sqrt(0.5) + 1e-4);
    CHECK(r.feasibility.equality_residual <= 1e-6);
  }
  SUBCASE("insufficient schedule") {
    const auto inst = build_instance(PartitionInstance({7, 3, 5, 9, 2}), ReductionParams::cp(1.0));
    SolverOptions o;
    o.penalty_schedule = {1};
    const auto r = penalty_solve(inst, initial_point(inst, InitStrategy::RandomBox, 1, 0), o);
    CHECK_FALSE(r.converged);
    CHECK(r.feasibility.equality_residual > kFeasibilityTol);
  }
  SUBCASE("PQP") {
    const auto inst = build_instance(PartitionInstance({1, 2, 3}), ReductionParams::pqp());
    SolverOptions o;
    o.n_starts = 10;
    const auto r = multi_start_solve(inst, o);
    CHECK(r.best_value <= -3.0 + 1e-4);
  }
}

TEST_CASE("multi-start contract") {
  const auto inst = build_instance(PartitionInstance({1, 2, 3}), ReductionParams::nup(1.0));
  SolverOptions o;
  o.n_starts = 50;
  o.seed = 7;
  const auto r = multi_start_solve(inst, o);
  CHECK(r.best_value <= 1.1339745962155614 + 1e-4);
  CHECK(r.per_start_values.size() == 50);
  CHECK(r.best_value == *std::min_element(r.per_start_values.begin(), r.per_start_values.end()));
  CHECK(r.per_start_values[r.best_start] == r.best_value);
  CHECK(non_increasing(r.objective_trajectory));

  o.n_starts = 1;
  CHECK(multi_start_solve(inst, o) == multi_start_solve(inst, o));
}

TEST_CASE("results do not depend on the thread count") {
  const auto inst = build_instance(PartitionInstance({4, 1, 3, 2}), ReductionParams::ncp(1.0));
  SolverOptions o;
  o.n_starts = 8;
  const auto a = multi_start_solve(inst, o);
  setenv("L12LAB_THREADS", "3", 1);
  const auto b = multi_start_solve(inst, o);
  unsetenv("L12LAB_THREADS");
  CHECK(a == b);
}

TEST_CASE("initial points are deterministic") {
  const auto inst = build_instance(PartitionInstance({1, 2, 3}), ReductionParams::up(1.0));
  for (auto s : {InitStrategy::Zero, InitStrategy::RandomBox, InitStrategy::PerturbedPattern}) {
    CHECK(initial_point(inst, s, 5, 2).x() == initial_point(inst, s, 5, 2).x());
    CHECK(initial_point(inst, s, 5, 2).size() == 6);
  }
  CHECK(initial_point(inst, InitStrategy::Zero, 5, 2).x() == Vector::Zero(6));
  CHECK(initial_point(inst, InitStrategy::RandomBox, 5, 2).x() !=
        initial_point(inst, InitStrategy::RandomBox, 5, 3).x());
  const auto nup = build_instance(PartitionInstance({1, 2, 3}), ReductionParams::nup(1.0));
  CHECK(initial_point(nup, InitStrategy::RandomBox, 5, 2).x().minCoeff() >= 0.0);
}

TEST_CASE("criticality residual") {
  for (double lambda : {0.5, 1.0, 1.5}) {
    for (std::size_t m : {1, 2, 4}) {
      std::vector<std::int64_t> s(m, 1);
      const auto inst = build_instance(PartitionInstance(s), ReductionParams::up(lambda));
      const double r0 = criticality_residual(inst, CandidatePoint(Vector::Zero(2 * m)));
      CHECK(r0 == doctest::Approx((2 - lambda) * std::sqrt(2.0 * m)).epsilon(1e-9));
      CHECK(r0 > 0.0);
    }
  }
  const auto inst = build_instance(PartitionInstance({1, 2}), ReductionParams::up(1.0));
  CHECK(criticality_residual(inst, CandidatePoint(Vector::Constant(4, 40.0))) > 10.0);

  const auto ncp = build_instance(PartitionInstance({1, 1}), ReductionParams::ncp(1.0));
  CHECK(criticality_residual(ncp, pattern(PartitionInstance({1, 1}), {true, false}, 1.0)) < 1e-10);
}

TEST_CASE("bad start length") {
  const auto inst = build_instance(PartitionInstance({1, 2}), ReductionParams::up(1.0));
  CHECK_THROWS(dca_solve(inst, CandidatePoint(Vector::Zero(3))));
  const auto cp = build_instance(PartitionInstance({1, 2}), ReductionParams::cp(1.0));
  CHECK_THROWS(dca_solve(cp, CandidatePoint(Vector::Zero(4))));
}
