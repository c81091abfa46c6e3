#include <set>
#include <sstream>

#include "doctest.h"
#include "l12/oracles.hpp"
#include "l12/verify.hpp"
#include "l12cli/instance_file.hpp"

using namespace l12;

TEST_CASE("standard corpus") {
  const auto& corpus = verify::standard_corpus();
  REQUIRE(corpus.size() == 200);
  std::set<std::size_t> sizes;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& S = corpus[i];
    sizes.insert(S.m());
    CHECK(S.m() >= 2);
    CHECK(S.m() <= 12);
    for (auto a : S.elements()) {
      CHECK(a >= 0);
      CHECK(a <= 50);
    }
    CHECK(oracles::brute_force_partition(S).has_value() == (i % 2 == 0));
  }
  CHECK(sizes.size() == 11);
}

TEST_CASE("standard corpus is stable") {
  std::ostringstream os;
  for (const auto& S : verify::standard_corpus()) {
    for (auto a : S.elements()) os << a << ',';
    os << '\n';
  }
  CHECK(cli::sha256_hex(os.str()) ==
        "fa94e0c37dae7ea370b8e5548c73417897346ff8bd381cf883f101ebebd7c548");
}

TEST_CASE("suite registry") {
  const auto& names = verify::suite_names();
  CHECK(names.size() == 12);
  CHECK(std::find(names.begin(), names.end(), "lemma33") != names.end());
  CHECK_THROWS_AS(verify::run_suite("nope"), std::invalid_argument);
}

TEST_CASE("fast suites pass") {
  for (const char* name : {"prop21", "thm-cp", "thm-ncp", "thm-up", "thm-nup", "lemma33", "decide"}) {
    const auto checks = verify::run_suite(name, 1);
    CHECK(!checks.empty());
    for (const auto& c : checks) {
      INFO(c.suite << ": " << c.name << " " << c.detail);
      CHECK(c.passed);
      CHECK(c.suite == name);
    }
  }
}
