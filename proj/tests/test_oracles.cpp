#include <cmath>
#include <limits>

#include "doctest.h"
#include "l12/oracles.hpp"
#include "l12/random.hpp"

using namespace l12;
using namespace l12::oracles;

TEST_CASE("brute force partition") {
  const PartitionInstance S({1, 2, 3});
  const auto cert = brute_force_partition(S);
  REQUIRE(cert);
  CHECK(cert->describe(S) == "{1,2}|{3}");
  CHECK(cert->sum1 == 3);
  CHECK(cert->sum2 == 3);
  CHECK_FALSE(brute_force_partition(PartitionInstance({1, 1, 3})));
  const PartitionInstance T({2, 2});
  CHECK(brute_force_partition(T)->describe(T) == "{2}|{2}");
  CHECK(brute_force_partition(PartitionInstance({0})));
}

TEST_CASE("partition QP") {
  const PartitionInstance S({1, 1});
  CHECK(eval_partition_qp(S, Vector{{1, 0}}, Vector{{0, 1}}) == -2.0);
  CHECK(eval_partition_qp(S, Vector{{0.5, 0.5}}, Vector{{0.5, 0.5}}) == -1.0);
  CHECK(eval_partition_qp(S, Vector::Zero(2), Vector::Zero(2)) == 0.0);
}

TEST_CASE("pattern minimum") {
  SUBCASE("NUP {1,2,3}") {
    const auto inst = build_instance(PartitionInstance({1, 2, 3}), ReductionParams::nup(1.0));
    const auto pm = enumerate_pattern_minimum(inst);
    CHECK(std::abs(pm.value - 1.1339745962155614) < 1e-12);
    CHECK(pm.argmins.size() == 2);
  }
  SUBCASE("NCP {1,1}") {
    const auto inst = build_instance(PartitionInstance({1, 1}), ReductionParams::ncp(1.0));
    const auto pm = enumerate_pattern_minimum(inst);
    CHECK(std::abs(pm.value - (2 - std::sqrt(2.0))) < 1e-15);
    REQUIRE(pm.argmins.size() == 2);
    CHECK(pm.argmins[0].x() + pm.argmins[1].x() == Vector::Ones(4));
  }
  SUBCASE("CP {1} has no feasible pattern") {
    const auto inst = build_instance(PartitionInstance({1}), ReductionParams::cp(1.0));
    const auto pm = enumerate_pattern_minimum(inst);
    CHECK(pm.value == std::numeric_limits<double>::infinity());
    CHECK(pm.argmins.empty());
  }
}

TEST_CASE("g(w)") {
  CHECK(std::abs(eval_g_w(Vector::Zero(3), 1.0, 2) + std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(eval_g_w(Vector{{1.0}}, 1.0, 1) - (2 - std::sqrt(5.0))) < 1e-15);
  CHECK(std::abs(eval_g_w(Vector::Zero(2), std::sqrt(2.0), 4) + 2 * std::sqrt(2.0)) < 1e-15);
  CHECK(grad_g_w(Vector::Zero(4), 1.3, 3) == Vector::Zero(4));
  CHECK(std::abs(grad_g_w(Vector{{1.0}}, 1.0, 1)[0] - 1.3167184270002524) < 1e-14);
}

TEST_CASE("g(w) gradient matches finite differences") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const double tau = rng.uniform(0.7, 1.4);
    const std::size_t m = 1 + rng.below(5);
    Vector w(1 + rng.below(3));
    for (auto& wi : w) wi = rng.uniform(-3, 3);
    const auto an = grad_g_w(w, tau, m);
    const auto fd = finite_diff_gradient([&](const Vector& x) { return eval_g_w(x, tau, m); }, w);
    CHECK((fd - an).lpNorm<Eigen::Infinity>() <= 1e-5 * std::max(1.0, an.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("g(w) unique minimizer") {
  auto r = check_gw_unique_minimizer(1.0, 3, GridSpec::cube(2, -3, 3, 0.01), 50, 1);
  CHECK(r.converged_to_origin);
  CHECK(r.gradient_norm >= 0.0);
  r = check_gw_unique_minimizer(1 / std::sqrt(2.0), 1, GridSpec::cube(1, -3, 3, 0.001), 50, 1);
  CHECK(r.converged_to_origin);
  CHECK(std::abs(r.point[0]) < 1e-12);
  CHECK(std::abs(r.objective + 0.7071067811865476) < 1e-12);
  CHECK(check_gw_unique_minimizer(1.4, 2, GridSpec::cube(2, -3, 3, 0.01), 50, 1).converged_to_origin);
}

TEST_CASE("coercivity bound") {
  CHECK(check_coercivity_bound(1.0, 2, 10'000, 1));
  CHECK(check_coercivity_bound(1.4, 5, 10'000, 1));
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    Vector w(3);
    for (auto& wi : w) wi = rng.uniform(-10, 10);
    CHECK(eval_g_w(w, 1.2, 3) >= g_w_coercivity_bound(w, 1.2, 3) - 1e-12);
  }
}

TEST_CASE("h(t) and its KKT residual") {
  CHECK(eval_h_t(Vector::Constant(4, 0.75), 1.0) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(eval_h_t(Vector::Ones(4), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_h_t(Vector::Zero(5), 1.0) == 5.0);
  CHECK(kkt_residual_nup(Vector::Constant(4, 0.75), 1.0) < 1e-15);
  CHECK(std::abs(kkt_residual_nup(Vector::Ones(4), 1.0) - 1.0) < 1e-15);
  CHECK(kkt_residual_nup(Vector::Constant(9, 5.0 / 6.0), 0.5) < 1e-12);
}

TEST_CASE("KKT point is optimal for h") {
  Rng rng(8);
  for (double lambda : {0.3, 1.0, 1.7}) {
    for (std::size_t m : {1, 2, 5}) {
      const double best = lower_bound_optimum(m, lambda);
      for (int i = 0; i < 500; ++i) {
        Vector t(static_cast<Eigen::Index>(m));
        for (auto& ti : t) ti = rng.uniform(0, 2);
        CHECK(eval_h_t(t, lambda) >= best - 1e-12);
      }
    }
  }
}

TEST_CASE("exchange moves decrease the UP lower bound") {
  Rng rng(9);
  for (double lambda : {0.5, 1.0, 1.5}) {
    for (int i = 0; i < 300; ++i) {
      Vector u(3), v(3);
      for (auto& x : u) x = rng.uniform(0.01, 2);
      for (auto& x : v) x = rng.uniform(0.01, 2);
      const auto [u2, v2] = exchange_point(u, v, 1, ExchangeCase::BothPositive, lambda);
      CHECK(eval_up_lower_bound(u2, v2, lambda) < eval_up_lower_bound(u, v, lambda));
    }
  }
}

TEST_CASE("lower bound evaluators agree") {
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    Vector x(6);
    for (auto& xi : x) xi = rng.uniform(-3, 3);
    const double a = eval_up_lower_bound(x, 1.2);
    CHECK(std::abs(a - eval_up_lower_bound(x.head(3), x.tail(3), 1.2)) <= 1e-14 * a);
  }
}

TEST_CASE("escape box") {
  const auto inst = build_instance(PartitionInstance({1, 2}), ReductionParams::up(1.0));
  CHECK(check_escape_box(inst, 10'000, 1));
  const double box = *closed_form_targets(2, ReductionParams::up(1.0)).escape_box;
  const auto p = CandidatePoint::from_uv(Vector{{box + 1, 0}}, Vector{{1e-3, 0}});
  CHECK(eval_objective(inst, p) > 2.0);
}

TEST_CASE("grid minimize") {
  SUBCASE("h on [0,2]") {
    auto spec = GridSpec::cube(1, 0, 2, 1e-4);
    const auto r = grid_minimize([](const Vector& t) { return eval_h_t(t, 1.0); }, spec);
    CHECK(std::abs(r.value) < 1e-12);
    CHECK(std::abs(r.point[0] - 1.0) < 1e-9);
  }
  SUBCASE("g(w) on [-3,3]^2") {
    const auto r = grid_minimize([](const Vector& w) { return eval_g_w(w, 1.0, 2); },
                                 GridSpec::cube(2, -3, 3, 1e-3));
    CHECK(r.point.norm() < 1e-9);
    CHECK(std::abs(r.value + std::sqrt(2.0)) < 1e-12);
  }
  SUBCASE("degenerate box") {
    int calls = 0;
    GridSpec spec = GridSpec::cube(2, 1, 1, 0.1);
    CHECK(spec.total_points() == 1);
    const auto r = grid_minimize(
        [&](const Vector& x) {
          ++calls;
          return x.sum();
        },
        spec);
    CHECK(calls == 1);
    CHECK(r.value == 2.0);
  }
  SUBCASE("cap") {
    auto spec = GridSpec::cube(4, -1, 1, 1e-3);
    CHECK_THROWS(grid_minimize([](const Vector&) { return 0.0; }, spec));
  }
}

TEST_CASE("finite differences") {
  const auto q = finite_diff_gradient([](const Vector& x) { return x.squaredNorm(); }, Vector{{1, 2}});
  CHECK((q - Vector{{2, 4}}).lpNorm<Eigen::Infinity>() < 1e-6);
  const auto a = finite_diff_gradient([](const Vector& x) { return std::abs(x[0]); }, Vector{{0.5}});
  CHECK(std::abs(a[0] - 1.0) < 1e-9);
}
