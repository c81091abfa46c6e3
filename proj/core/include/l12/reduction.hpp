#pragma once

// Partition-to-optimization reduction.
//
// A multiset S = {a_1..a_m} becomes the linear system
//
//     A = [ I_m   I_m ]      b = [ 1_m ]      x = (u, v) in R^{2m}
//         [ a^T  -a^T ]          [  0  ]
//
// and S admits a balanced partition iff the optimal value of the chosen
// problem kind equals a closed-form target.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l12/model.hpp"
#include "l12/solvers.hpp"

namespace l12 {

struct ReductionParams {
  ProblemKind kind = ProblemKind::PQP;
  std::optional<double> tau;
  std::optional<double> lambda;

  static ReductionParams pqp() { return {ProblemKind::PQP, {}, {}}; }
  static ReductionParams cp(double tau) { return {ProblemKind::CP, tau, {}}; }
  static ReductionParams ncp(double tau) { return {ProblemKind::NCP, tau, {}}; }
  static ReductionParams up(double lambda) { return {ProblemKind::UP, {}, lambda}; }
  static ReductionParams nup(double lambda) { return {ProblemKind::NUP, {}, lambda}; }

  /// Builds params for `kind`, taking tau or lambda as required by the kind.
  static ReductionParams make(ProblemKind kind, std::optional<double> tau,
                              std::optional<double> lambda);

  /// Throws std::invalid_argument unless exactly the kind's parameter is set.
  void validate() const;
};

struct ClosedFormTargets {
  double c = 1.0;             // pattern magnitude
  double target_value = 0.0;  // optimal value iff S is partitionable
  std::optional<double> zero_point_value;  // f(0) = m, UP/NUP only
  std::optional<double> escape_box;        // 1 + sqrt(m) + 2m/lambda, UP/NUP only
};

/// c(lambda) = (lambda/sqrt(m) - lambda + 2) / 2
double pattern_magnitude(std::size_t m, double lambda);
/// g*(lambda) = lambda ((1 - lambda/4) m + (lambda/2 - 1) sqrt(m) - lambda/4)
double lower_bound_optimum(std::size_t m, double lambda);

ClosedFormTargets closed_form_targets(std::size_t m, const ReductionParams& params);

ProblemInstance build_instance(const PartitionInstance& S, const ReductionParams& params);

struct PartitionCertificate {
  std::vector<bool> assignment;  // true: subset 1
  std::int64_t sum1 = 0;
  std::int64_t sum2 = 0;

  bool balanced() const noexcept { return sum1 == sum2; }
  /// Renders "{a..}|{b..}" with elements in input order.
  std::string describe(const PartitionInstance& S) const;

  static PartitionCertificate from_assignment(const PartitionInstance& S,
                                              std::vector<bool> assignment);
};

/// Reads a pattern point back into a subset assignment: index i goes to
/// subset 1 when (u_i, v_i) is within tol of (c, 0) and to subset 2 when
/// within tol of (0, c). Throws std::domain_error ("not a pattern point")
/// when some index matches neither.
PartitionCertificate decode_partition(const PartitionInstance& S, const CandidatePoint& p,
                                      const ClosedFormTargets& targets, double tol);

enum class DecideMethod { Pattern, Solver };
enum class Answer { Yes, No };

DecideMethod parse_decide_method(std::string_view name);
std::string_view to_string(Answer a) noexcept;

struct DecideOptions {
  std::size_t pattern_cap = 24;  // max m for exhaustive pattern enumeration
  SolverOptions solver;          // used by DecideMethod::Solver
};

struct Decision {
  Answer answer = Answer::No;
  std::optional<PartitionCertificate> certificate;
  double achieved_value = 0.0;
  double target_value = 0.0;
  double gap = 0.0;  // achieved - target
  /// Point attaining achieved_value (pattern argmin or solver best point).
  std::optional<CandidatePoint> witness;
};

/// Pattern method: enumerates all 2^m sign patterns of X*/Y* with exact
/// integer balances, evaluates the instance objective at the best one and
/// answers YES iff a balanced pattern exists (ties broken towards the
/// lexicographically smallest assignment, subset 1 first).
///
/// Solver method: multi-start local solve; YES only if the achieved value is
/// within tol of the target and the decoded certificate balances exactly.
/// A solver NO means "no certificate found".
Decision decide_partition(const PartitionInstance& S, const ReductionParams& params,
                          DecideMethod method, double tol = 1e-6,
                          const DecideOptions& options = {});

}  // namespace l12
