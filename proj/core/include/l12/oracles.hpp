#pragma once

// Exact and brute-force checks for the reduction's analytic claims.
//
// These routines deliberately avoid the solver code paths: partition
// questions are answered by plain enumeration of integer sums, global minima
// by exhaustive grids, gradients by central differences.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "l12/model.hpp"
#include "l12/random.hpp"
#include "l12/reduction.hpp"

namespace l12::oracles {

using ScalarField = std::function<double(const Vector&)>;

// --- partition -------------------------------------------------------------

/// Lexicographically smallest balanced assignment (subset 1 before subset 2),
/// or nullopt. Throws std::invalid_argument for m > 30.
std::optional<PartitionCertificate> brute_force_partition(const PartitionInstance& S);

/// sum_i (-u_i^2 - v_i^2)
double eval_partition_qp(const PartitionInstance& S, const Vector& u, const Vector& v);

struct PatternMinimum {
  double value = 0.0;  // +inf when no pattern is feasible
  std::vector<CandidatePoint> argmins;
};

/// Evaluates the instance objective at all 2^m points of X* (c = 1) or
/// Y* (c = c(lambda)); constrained kinds only see patterns with exact integer
/// balance. Argmins are the patterns within 1e-12 (relative) of the minimum.
PatternMinimum enumerate_pattern_minimum(const ProblemInstance& inst, std::size_t cap = 24);

// --- g(w) = 2||w||_2^2 - tau sqrt(m + 2||w||_2^2 + 2||w||_4^4) --------------

double eval_g_w(const Vector& w, double tau, std::size_t m);
Vector grad_g_w(const Vector& w, double tau, std::size_t m);

/// Right-hand side of the coercivity bound
/// g(w) >= (2 - sqrt2 tau)||w||^2 - sqrt(m) tau - sqrt2 tau ||w||.
double g_w_coercivity_bound(const Vector& w, double tau, std::size_t m);

struct GridSpec {
  Vector lower;
  Vector upper;
  double step = 0.01;
  std::uint64_t max_points = 100'000'000;

  static GridSpec cube(Eigen::Index dim, double lo, double hi, double step);
  /// Points per axis: floor((hi - lo)/step) + 1.
  std::vector<std::uint64_t> axis_counts() const;
  std::uint64_t total_points() const;
  void validate() const;
  double coordinate(Eigen::Index axis, std::uint64_t index) const {
    return lower[axis] + static_cast<double>(index) * step;
  }
};

struct GridResult {
  double value = 0.0;
  Vector point;
};

/// Exhaustive minimization over the grid. Ties go to the lexicographically
/// smallest point. Evaluation is split across worker threads over the first
/// axis and reduced deterministically.
GridResult grid_minimize(const ScalarField& f, const GridSpec& spec);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
Vector finite_diff_gradient(const ScalarField& f, const Vector& x, double h = 1e-6);

struct StationarityReport {
  Vector point;                    // grid argmin
  double gradient_norm = 0.0;      // ||grad g|| at the grid argmin
  double objective = 0.0;          // g at the grid argmin
  bool grid_min_at_origin = false; // argmin is the grid point nearest 0
  bool descents_at_origin = false; // every descent ends with ||w|| <= 1e-6
  double max_final_norm = 0.0;     // largest ||w|| over all descents
  std::size_t starts = 0;
  bool converged_to_origin = false;  // both of the above
};

/// Backtracking gradient descent (step halving from 1.0, sufficient
/// decrease constant 0.25, at most 500 iterations). Returns the final
/// iterate.
Vector gradient_descent(const ScalarField& f, const std::function<Vector(const Vector&)>& grad,
                        Vector x0, int max_iters = 500);

/// Grid search over `spec` (k = spec dimension) plus n_starts descents from
/// uniform random points of the box.
StationarityReport check_gw_unique_minimizer(double tau, std::size_t m, const GridSpec& spec,
                                             std::size_t n_starts, std::uint64_t seed);

/// Samples w in R^m with log-uniform radii in [1e-6, 1e3] and checks the
/// coercivity bound at each and at w = 0.
bool check_coercivity_bound(double tau, std::size_t m, std::size_t samples, std::uint64_t seed);

// --- h(t) and the KKT system of the nonnegative lower-bound problem ---------

/// h(t) = sum (t_i - 1)^2 + lambda (sum t_i - ||t||_2), t >= 0.
double eval_h_t(const Vector& t, double lambda);

/// Norm of the stationarity residual 2(t_i - 1) + lambda - lambda t_i/||t||
/// with mu_i = 0; at t_i = 0 only a negative value (a mu_i < 0) counts.
double kkt_residual_nup(const Vector& t, double lambda);

// --- UP lower bound g(u, v) and the escape box -------------------------------

/// g(u,v) = sum (u_i + v_i - 1)^2 + lambda (sum |u_i| + |v_i| - ||(u,v)||_2)
double eval_up_lower_bound(const Vector& u, const Vector& v, double lambda);
/// Same, for x = (u, v) stacked; does not allocate.
double eval_up_lower_bound(const Vector& x, double lambda);

/// Descent exchanges on the UP lower bound. Each returns the modified pair.
enum class ExchangeCase { NegativeSum, BothZero, BothPositive };
std::pair<Vector, Vector> exchange_point(const Vector& u, const Vector& v, std::size_t i,
                                         ExchangeCase which, double lambda);

enum class EscapeCase { LargeUSmallV = 1, LargeVSmallU = 2, LargeUBigV = 3, LargeVBigU = 4 };

/// One sample outside the escape box for the given case: coordinate j gets
/// |u_j| (or |v_j|) beyond the box; the other coordinates are uniform in
/// [-box, box] ([0, box] when nonneg).
CandidatePoint escape_box_sample(std::size_t m, double lambda, bool nonneg, EscapeCase which,
                                 Rng& rng);

/// True iff every stratified sample outside the box has objective > m.
bool check_escape_box(const ProblemInstance& inst, std::size_t samples, std::uint64_t seed);

}  // namespace l12::oracles
