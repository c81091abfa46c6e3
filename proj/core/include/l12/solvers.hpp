#pragma once

// Local solvers for the L1-L2 problem family.
//
// Every objective is treated as a difference of convex functions
//
//   F(x) = w_ls ||Ax - b||^2 + w_l1 ||x||_1 - w_l2 ||x||_2 - w_sq ||x||^2
//          (+ indicator of x >= 0 for nonnegative kinds)
//
// and minimized by DCA: the concave part is linearized at the iterate and the
// convex subproblem is solved by monotone FISTA with a soft-threshold prox
// (one-sided for nonnegative kinds). Equality-constrained kinds are handled by
// a quadratic penalty rho ||Ax - b||^2 with an increasing rho schedule.

#include <cstdint>
#include <optional>
#include <vector>

#include "l12/model.hpp"

namespace l12 {

enum class InitStrategy { Zero, RandomBox, PerturbedPattern };

InitStrategy parse_init_strategy(std::string_view name);
std::string_view to_string(InitStrategy s) noexcept;

struct SolverOptions {
  int max_outer_iters = 500;
  int inner_iters = 2000;
  double stop_tol = 1e-8;
  std::vector<double> penalty_schedule = {1, 10, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  int n_starts = 50;
  std::uint64_t seed = 0;
  InitStrategy init_strategy = InitStrategy::PerturbedPattern;

  /// Throws std::invalid_argument on non-positive counts/tolerances or a
  /// schedule that is empty or not strictly increasing.
  void validate() const;
};

/// Equality residual at or below which a penalty solve counts as feasible.
inline constexpr double kFeasibilityTol = 1e-6;

struct SolveReport {
  CandidatePoint best_point;
  double best_value = 0.0;
  std::vector<double> per_start_values;
  int outer_iterations = 0;
  /// Objective per outer iteration of the best start. For penalty solves this
  /// is the penalized objective of the final rho stage.
  std::vector<double> objective_trajectory;
  double criticality_residual = 0.0;
  EvaluationResult feasibility;
  bool converged = false;
  std::size_t best_start = 0;

  friend bool operator==(const SolveReport& a, const SolveReport& b);
};

/// DCA for least-squares kinds (UP, NUP, GENERIC with lambda).
SolveReport dca_solve(const ProblemInstance& inst, const CandidatePoint& x0,
                      const SolverOptions& opts = {});

/// Quadratic-penalty DCA for equality-constrained kinds (CP, NCP, PQP,
/// GENERIC with tau), warm-started across the penalty schedule.
SolveReport penalty_solve(const ProblemInstance& inst, const CandidatePoint& x0,
                          const SolverOptions& opts = {});

/// Dispatches to dca_solve / penalty_solve by kind.
SolveReport solve_from(const ProblemInstance& inst, const CandidatePoint& x0,
                       const SolverOptions& opts = {});

/// Starting point number `index` for the given strategy; a pure function of
/// (instance, strategy, seed, index).
CandidatePoint initial_point(const ProblemInstance& inst, InitStrategy strategy,
                             std::uint64_t seed, std::size_t index);

/// Runs opts.n_starts solves, in parallel, and keeps the best (lowest value;
/// for constrained kinds feasible starts win over infeasible ones; ties go to
/// the lowest start index).
SolveReport multi_start_solve(const ProblemInstance& inst, const SolverOptions& opts = {});

/// First-order criticality measure, zero at critical points.
///
/// Least-squares kinds: norm of the gradient mapping L (x - prox(x - grad/L))
/// where grad is the gradient of the smooth part minus the linearized
/// concave part. Constrained kinds: min over multipliers mu of the distance
/// from -(grad + A^T mu) to the subdifferential of the nonsmooth part.
double criticality_residual(const ProblemInstance& inst, const CandidatePoint& p);

/// Largest eigenvalue of A^T A by power iteration (100 iterations).
double gram_spectral_norm(const Matrix& A);

}  // namespace l12
