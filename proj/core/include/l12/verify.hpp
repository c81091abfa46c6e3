#pragma once

// Verification suites: property and oracle checks over fixed instance sets.
//
//   prop21    PQP pattern minimum = -m iff the multiset is partitionable
//   thm-cp    CP pattern minimum = m - tau sqrt(m) iff partitionable
//   thm-ncp   same for NCP
//   thm-up    UP pattern minimum = g*(lambda) iff partitionable, NO gap >= 0.9 c^2
//   thm-nup   same for NUP
//   lemma23   g(w) has its unique minimizer at 0; gradient vs finite differences
//   lemma33   c(lambda) 1_m is the KKT point and minimizer of h(t)
//   lemma37   exchange moves strictly decrease the UP lower bound
//   prop31    every point outside the escape box has objective > m
//   global    exhaustive grid on the UP lower bound at m = 1, 2
//   solver    multi-start solver contract on the instances above
//   decide    pattern decisions agree with brute force

#include <array>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "l12/model.hpp"

namespace l12::verify {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr std::array<double, 3> kTauGrid = {1.0 / std::numbers::sqrt2, 1.0, 1.4};
inline constexpr std::array<double, 3> kLambdaGrid = {0.5, 1.0, 1.5};

/// 200 multisets with m = 2..12 and elements in [0, 50]; even positions are
/// partitionable, odd positions are not. Fixed across runs and platforms.
const std::vector<PartitionInstance>& standard_corpus();

/// Suite names in run order (without "all").
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". `seed` drives all sampling;
/// the corpus does not depend on it. Throws std::invalid_argument for an
/// unknown suite.
std::vector<CheckResult> run_suite(std::string_view name, std::uint64_t seed = 1);

}  // namespace l12::verify
