#include "l12/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "l12/parallel.hpp"
#include "l12/random.hpp"
#include "l12/reduction.hpp"

namespace l12 {

namespace {

// F(x) = w_ls ||Ax - b||^2 + w_l1 ||x||_1 - w_l2 ||x||_2 - w_sq ||x||^2 (+ x >= 0)
struct DcObjective {
  const Matrix* A = nullptr;
  const Vector* b = nullptr;
  Matrix gram;  // A^T A
  Vector atb;   // A^T b
  double w_ls = 1.0;
  double w_l1 = 0.0;
  double w_l2 = 0.0;
  double w_sq = 0.0;
  bool nonneg = false;
  double lipschitz = 1.0;  // of the gradient of w_ls ||Ax - b||^2

  void bind(const ProblemInstance& inst) {
    A = &inst.A();
    b = &inst.b();
    gram.noalias() = A->transpose() * (*A);
    atb.noalias() = A->transpose() * (*b);
  }

  double convex_part(const Vector& x) const {
    return w_ls * ((*A) * x - *b).squaredNorm() + w_l1 * x.lpNorm<1>();
  }
  double concave_part(const Vector& x) const {
    return w_l2 * x.norm() + w_sq * x.squaredNorm();
  }
  double value(const Vector& x) const { return convex_part(x) - concave_part(x); }

  // Element of the subdifferential of the concave part; zero vector at x = 0
  // for the norm term.
  Vector concave_gradient(const Vector& x) const {
    Vector y = 2.0 * w_sq * x;
    const double norm = x.norm();
    if (w_l2 != 0.0 && norm > 0.0) y += (w_l2 / norm) * x;
    return y;
  }

  void smooth_gradient(const Vector& x, const Vector& y, Vector& out) const {
    out.noalias() = gram * x;
    out = 2.0 * w_ls * (out - atb) - y;
  }
  Vector smooth_gradient(const Vector& x, const Vector& y) const {
    Vector g(x.size());
    smooth_gradient(x, y, g);
    return g;
  }

  void prox(const Vector& z, Vector& out) const {
    const double thr = w_l1 / lipschitz;
    if (nonneg) {
      out = (z.array() - thr).max(0.0).matrix();
    } else {
      out = (z.array().sign() * (z.array().abs() - thr).max(0.0)).matrix();
    }
  }
  Vector prox(const Vector& z) const {
    Vector out(z.size());
    prox(z, out);
    return out;
  }
};

DcObjective least_squares_objective(const ProblemInstance& inst, double lam_max) {
  DcObjective f;
  f.bind(inst);
  f.w_ls = 1.0;
  f.w_l1 = *inst.lambda();
  f.w_l2 = *inst.lambda();
  f.nonneg = inst.nonneg();
  f.lipschitz = 2.0 * lam_max;
  return f;
}

DcObjective penalty_objective(const ProblemInstance& inst, double rho, double lam_max) {
  DcObjective f;
  f.bind(inst);
  f.w_ls = rho;
  if (inst.form() == ObjectiveForm::NegativeSquares) {
    f.w_sq = 1.0;
  } else {
    f.w_l1 = 1.0;
    f.w_l2 = *inst.tau();
  }
  f.nonneg = inst.nonneg();
  f.lipschitz = 2.0 * rho * lam_max;
  return f;
}

// Support polish for the DCA subproblem. With the support and signs of z
// fixed, the subproblem is the quadratic
//   q(x_S) = w_ls x_S^T G_SS x_S - 2 w_ls rhs^T x_S,
//   rhs = A_S^T b - (w_l1 sign_S - y_S) / (2 w_ls),  G = A^T A.
// Active-set loop: take the least-squares step towards the minimizer of q; if
// G_SS x = rhs is inconsistent, q decreases linearly along the null-space
// residual, so follow it. Either move stops at the first sign change, where
// that coordinate leaves the support. Returns nothing if q is unbounded.
std::optional<Vector> polish_support(const DcObjective& f, const Vector& y, const Vector& z,
                                     std::vector<Eigen::Index> support) {
  Vector out = z;
  for (Eigen::Index pass = 0; pass <= z.size() && !support.empty(); ++pass) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix g(k, k);
    Vector rhs(k);
    Vector cur(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto i = support[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < k; ++c) g(r, c) = f.gram(i, support[static_cast<std::size_t>(c)]);
      const double sign = out[i] > 0.0 ? 1.0 : -1.0;
      rhs[r] = f.atb[i] - (f.w_l1 * sign - y[i]) / (2.0 * f.w_ls);
      cur[r] = out[i];
    }
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(g);
    Vector dir = cod.solve(rhs - g * cur);
    bool inconsistent = false;
    if ((cur + dir).cwiseProduct(cur).minCoeff() > 0.0) {
      cur += dir;
      dir = rhs - g * cur;
      inconsistent = dir.lpNorm<Eigen::Infinity>() > 1e-10 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
      if (!inconsistent) {
        for (Eigen::Index r = 0; r < k; ++r) out[support[static_cast<std::size_t>(r)]] = cur[r];
        return out;
      }
    }
    // Ratio test along dir.
    double alpha = std::numeric_limits<double>::infinity();
    Eigen::Index blocker = -1;
    for (Eigen::Index r = 0; r < k; ++r) {
      if (cur[r] * dir[r] < 0.0) {
        const double a = -cur[r] / dir[r];
        if (a < alpha) {
          alpha = a;
          blocker = r;
        }
      }
    }
    if (blocker < 0) {
      if (inconsistent) return std::nullopt;
      break;
    }
    cur += alpha * dir;
    cur[blocker] = 0.0;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto i = support[static_cast<std::size_t>(r)];
      if (cur[r] * out[i] > 0.0) {
        kept.push_back(i);
        out[i] = cur[r];
      } else {
        out[i] = 0.0;
      }
    }
    support.swap(kept);
  }
  return out;
}

// Monotone FISTA with gradient restart on the convex DCA subproblem
//   min  w_ls ||Ax - b||^2 + w_l1 ||x||_1 - <y, x>   (+ x >= 0)
// started at x, with a support polish every few iterations. The returned
// point never has a larger subproblem value than x.
Vector solve_subproblem(const DcObjective& f, const Vector& y, const Vector& x_start,
                        int max_iters, double tol) {
  constexpr int kPolishEvery = 10;
  const auto phi = [&](const Vector& x) { return f.convex_part(x) - y.dot(x); };
  const Eigen::Index n = x_start.size();
  Vector x = x_start;
  double phi_x = phi(x);
  Vector w = x;
  Vector x_prev(n);
  Vector grad(n);
  Vector z(n);
  Vector probe(n);
  std::vector<Eigen::Index> support;
  std::vector<Eigen::Index> last_support;
  double t = 1.0;
  const auto fixed_point_gap = [&](const Vector& p) {
    f.smooth_gradient(p, y, grad);
    f.prox(p - grad / f.lipschitz, probe);
    return (probe - p).lpNorm<Eigen::Infinity>();
  };
  for (int it = 0; it < max_iters; ++it) {
    f.smooth_gradient(w, y, grad);
    f.prox(w - grad / f.lipschitz, z);
    const double step = (z - w).lpNorm<Eigen::Infinity>();
    const double phi_z = phi(z);
    x_prev = x;
    if (phi_z <= phi_x) {
      x = z;
      phi_x = phi_z;
    }
    const double scale = tol * std::max(1.0, x.lpNorm<Eigen::Infinity>());
    if (step <= scale) break;
    if ((it + 1) % kPolishEvery == 0) {
      support.clear();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (z[i] != 0.0) support.push_back(i);
      }
      // Only polish once the support has settled.
      const bool settled = support == last_support;
      last_support.swap(support);
      if (auto p = settled ? polish_support(f, y, z, last_support) : std::nullopt) {
        const double phi_p = phi(*p);
        if (phi_p <= phi_x) {
          if (fixed_point_gap(*p) <= scale) return std::move(*p);
          // Better but not optimal: continue from it with fresh momentum.
          x = std::move(*p);
          phi_x = phi_p;
          w = x;
          t = 1.0;
          continue;
        }
      }
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if ((z - w).dot(x - x_prev) > 0.0) t_next = 1.0;  // adaptive restart
    w = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
  }
  return x;
}

struct DcaRun {
  Vector x;
  std::vector<double> trajectory;
  int iterations = 0;
  bool converged = false;
};

DcaRun run_dca(const DcObjective& f, Vector x, const SolverOptions& opts) {
  if (f.nonneg) x = x.cwiseMax(0.0);
  DcaRun run;
  double fx = f.value(x);
  if (!std::isfinite(fx)) throw std::domain_error("objective is not finite at the start point");
  run.trajectory.push_back(fx);
  const double inner_tol = 1e-2 * opts.stop_tol;
  for (int k = 0; k < opts.max_outer_iters; ++k) {
    const Vector y = f.concave_gradient(x);
    Vector next = solve_subproblem(f, y, x, opts.inner_iters, inner_tol);
    if (!next.allFinite()) throw std::domain_error("non-finite iterate (step-size safeguard)");
    const double fn = f.value(next);
    ++run.iterations;
    if (!(fn <= fx)) {
      // Only rounding can make a DCA step increase F; keep the current point.
      run.converged = true;
      break;
    }
    const double change = fx - fn;
    const double step = (next - x).norm();
    const bool small_change = change <= opts.stop_tol * std::max(1.0, std::abs(fx));
    const bool small_step = step <= opts.stop_tol * std::max(1.0, x.norm());
    x = std::move(next);
    fx = fn;
    run.trajectory.push_back(fx);
    if (small_change && small_step) {
      run.converged = true;
      break;
    }
  }
  run.x = std::move(x);
  return run;
}

void require_start(const ProblemInstance& inst, const CandidatePoint& x0) {
  if (x0.size() != inst.cols()) {
    throw std::invalid_argument("start point length does not match instance");
  }
}

double project_interval(double z, double lo, double hi) { return std::clamp(z, lo, hi); }

}  // namespace

InitStrategy parse_init_strategy(std::string_view name) {
  if (name == "zero") return InitStrategy::Zero;
  if (name == "random_box") return InitStrategy::RandomBox;
  if (name == "perturbed_pattern") return InitStrategy::PerturbedPattern;
  throw std::invalid_argument("unknown init strategy '" + std::string(name) + "'");
}

std::string_view to_string(InitStrategy s) noexcept {
  switch (s) {
    case InitStrategy::Zero: return "zero";
    case InitStrategy::RandomBox: return "random_box";
    case InitStrategy::PerturbedPattern: return "perturbed_pattern";
  }
  return "zero";
}

void SolverOptions::validate() const {
  if (max_outer_iters < 1 || inner_iters < 1 || n_starts < 1) {
    throw std::invalid_argument("solver iteration and start counts must be >= 1");
  }
  if (!(stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");
  if (penalty_schedule.empty()) throw std::invalid_argument("penalty schedule is empty");
  for (std::size_t i = 0; i < penalty_schedule.size(); ++i) {
    if (!(penalty_schedule[i] > 0.0) ||
        (i > 0 && !(penalty_schedule[i] > penalty_schedule[i - 1]))) {
      throw std::invalid_argument("penalty schedule must be positive and strictly increasing");
    }
  }
}

bool operator==(const SolveReport& a, const SolveReport& b) {
  const auto same_point = [](const CandidatePoint& p, const CandidatePoint& q) {
    return p.size() == q.size() && (p.x().array() == q.x().array()).all();
  };
  return same_point(a.best_point, b.best_point) && a.best_value == b.best_value &&
         a.per_start_values == b.per_start_values && a.outer_iterations == b.outer_iterations &&
         a.objective_trajectory == b.objective_trajectory &&
         a.criticality_residual == b.criticality_residual &&
         a.feasibility.objective == b.feasibility.objective &&
         a.feasibility.equality_residual == b.feasibility.equality_residual &&
         a.feasibility.nonneg_violation == b.feasibility.nonneg_violation &&
         a.converged == b.converged && a.best_start == b.best_start;
}

double gram_spectral_norm(const Matrix& A) {
  const Eigen::Index n = A.cols();
  if (n == 0) return 0.0;
  // A non-constant start avoids being orthogonal to the top eigenvector of
  // the reduction matrices (the all-ones vector is an eigenvector of A^T A).
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * static_cast<double>(i);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector w = A.transpose() * (A * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    estimate = v.dot(w);
    v = w / norm;
  }
  return estimate;
}

SolveReport dca_solve(const ProblemInstance& inst, const CandidatePoint& x0,
                      const SolverOptions& opts) {
  opts.validate();
  if (inst.form() != ObjectiveForm::LeastSquaresL1L2) {
    throw std::invalid_argument("dca_solve handles UP/NUP instances; use penalty_solve");
  }
  require_start(inst, x0);
  // Power iteration under-estimates; a 1% margin keeps 1/L a safe step.
  const double lam_max = 1.01 * gram_spectral_norm(inst.A());
  const auto f = least_squares_objective(inst, lam_max);
  auto run = run_dca(f, x0.x(), opts);

  SolveReport r;
  r.best_point = CandidatePoint(std::move(run.x));
  r.best_value = eval_objective(inst, r.best_point);
  r.per_start_values = {r.best_value};
  r.outer_iterations = run.iterations;
  r.objective_trajectory = std::move(run.trajectory);
  r.feasibility = eval_feasibility(inst, r.best_point);
  r.criticality_residual = criticality_residual(inst, r.best_point);
  r.converged = run.converged;
  return r;
}

SolveReport penalty_solve(const ProblemInstance& inst, const CandidatePoint& x0,
                          const SolverOptions& opts) {
  opts.validate();
  if (!inst.has_equality_constraints()) {
    throw std::invalid_argument("penalty_solve handles equality-constrained kinds; use dca_solve");
  }
  require_start(inst, x0);
  const double lam_max = 1.01 * gram_spectral_norm(inst.A());
  Vector x = x0.x();
  DcaRun run;
  int total_iterations = 0;
  for (double rho : opts.penalty_schedule) {
    const auto f = penalty_objective(inst, rho, lam_max);
    run = run_dca(f, std::move(x), opts);
    x = run.x;
    total_iterations += run.iterations;
  }

  SolveReport r;
  r.best_point = CandidatePoint(std::move(x));
  r.best_value = eval_objective(inst, r.best_point);
  r.per_start_values = {r.best_value};
  r.outer_iterations = total_iterations;
  r.objective_trajectory = std::move(run.trajectory);
  r.feasibility = eval_feasibility(inst, r.best_point);
  r.criticality_residual = criticality_residual(inst, r.best_point);
  r.converged = r.feasibility.equality_residual <= kFeasibilityTol &&
                r.feasibility.nonneg_violation <= kFeasibilityTol;
  return r;
}

SolveReport solve_from(const ProblemInstance& inst, const CandidatePoint& x0,
                       const SolverOptions& opts) {
  return inst.has_equality_constraints() ? penalty_solve(inst, x0, opts)
                                         : dca_solve(inst, x0, opts);
}

CandidatePoint initial_point(const ProblemInstance& inst, InitStrategy strategy,
                             std::uint64_t seed, std::size_t index) {
  const Eigen::Index n = inst.cols();
  Rng rng(seed, index);
  Vector x = Vector::Zero(n);
  switch (strategy) {
    case InitStrategy::Zero:
      break;
    case InitStrategy::RandomBox: {
      double lo = 0.0;
      double hi = 2.0;
      if (inst.source() && inst.form() == ObjectiveForm::LeastSquaresL1L2) {
        const auto params = ReductionParams::make(inst.kind(), inst.tau(), inst.lambda());
        hi = *closed_form_targets(inst.m(), params).escape_box;
        lo = inst.nonneg() ? 0.0 : -hi;
      }
      for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
      break;
    }
    case InitStrategy::PerturbedPattern: {
      if (!inst.source()) {
        throw std::invalid_argument("perturbed_pattern starts need a reduction instance");
      }
      const auto params = ReductionParams::make(inst.kind(), inst.tau(), inst.lambda());
      const double c = closed_form_targets(inst.m(), params).c;
      const auto m = static_cast<Eigen::Index>(inst.m());
      for (Eigen::Index i = 0; i < m; ++i) x[rng.coin() ? i : m + i] = c;
      const double sigma = 0.1 * c;
      for (Eigen::Index i = 0; i < n; ++i) x[i] += sigma * rng.normal();
      break;
    }
  }
  if (inst.nonneg()) x = x.cwiseMax(0.0);
  return CandidatePoint(std::move(x));
}

SolveReport multi_start_solve(const ProblemInstance& inst, const SolverOptions& opts) {
  opts.validate();
  const auto n = static_cast<std::size_t>(opts.n_starts);
  std::vector<SolveReport> runs(n);
  parallel_for(n, [&](std::size_t s) {
    runs[s] = solve_from(inst, initial_point(inst, opts.init_strategy, opts.seed, s), opts);
  });

  const bool constrained = inst.has_equality_constraints();
  std::vector<double> merit(n);
  for (std::size_t s = 0; s < n; ++s) {
    const bool ok = !constrained || runs[s].converged;
    merit[s] = ok ? runs[s].best_value : std::numeric_limits<double>::infinity();
  }
  std::size_t best = 0;
  for (std::size_t s = 1; s < n; ++s) {
    if (merit[s] < merit[best]) best = s;
  }
  if (!std::isfinite(merit[best])) {
    // No feasible start: fall back to the least infeasible one.
    for (std::size_t s = 1; s < n; ++s) {
      if (runs[s].feasibility.equality_residual < runs[best].feasibility.equality_residual) {
        best = s;
      }
    }
  }
  SolveReport out = std::move(runs[best]);
  out.per_start_values = std::move(merit);
  out.best_start = best;
  return out;
}

double criticality_residual(const ProblemInstance& inst, const CandidatePoint& p) {
  if (p.size() != inst.cols()) throw std::invalid_argument("point length does not match");
  const Vector& x = p.x();
  const double lam_max = 1.01 * gram_spectral_norm(inst.A());

  if (inst.form() == ObjectiveForm::LeastSquaresL1L2) {
    const auto f = least_squares_objective(inst, lam_max);
    const Vector y = f.concave_gradient(x);
    const Vector z = f.prox(x - f.smooth_gradient(x, y) / f.lipschitz);
    return f.lipschitz * (x - z).norm();
  }

  // Constrained kinds: min over mu of ||e(mu)||, e_i = q_i - P_{I_i}(q_i),
  // q = s + A^T mu, where s is the gradient of the concave part and I_i the
  // negated subdifferential of w_l1 |x_i| (+ normal cone of x_i >= 0).
  // Coordinates within kFeasibilityTol of zero count as zero.
  const auto f = penalty_objective(inst, 1.0, lam_max);
  const Vector s = -f.concave_gradient(x);
  const Eigen::Index n = x.size();
  Vector lo(n);
  Vector hi(n);
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x[i] > kFeasibilityTol) {
      lo[i] = hi[i] = -f.w_l1;
    } else if (x[i] < -kFeasibilityTol && !f.nonneg) {
      lo[i] = hi[i] = f.w_l1;
    } else {
      lo[i] = -f.w_l1;
      hi[i] = f.nonneg ? inf : f.w_l1;
    }
  }
  const Matrix& A = inst.A();
  const auto excess = [&](const Vector& mu) {
    Vector e = s + A.transpose() * mu;
    for (Eigen::Index i = 0; i < n; ++i) e[i] -= project_interval(e[i], lo[i], hi[i]);
    return e;
  };
  // Semismooth Newton: on the set J of violated coordinates the objective is
  // the least-squares problem ||A_J^T mu + s_J - bound_J||^2.
  Vector mu = Vector::Zero(A.rows());
  Vector e = excess(mu);
  double value = e.squaredNorm();
  for (int it = 0; it < 100 && value > 0.0; ++it) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (e[i] != 0.0) active.push_back(i);
    }
    Matrix at(static_cast<Eigen::Index>(active.size()), A.rows());
    Vector ej(at.rows());
    for (Eigen::Index r = 0; r < at.rows(); ++r) {
      at.row(r) = A.col(active[static_cast<std::size_t>(r)]).transpose();
      ej[r] = e[active[static_cast<std::size_t>(r)]];
    }
    const Vector d = -Eigen::CompleteOrthogonalDecomposition<Matrix>(at).solve(ej);
    bool improved = false;
    for (double step = 1.0; step >= 1e-12; step *= 0.5) {
      Vector trial = mu + step * d;
      Vector et = excess(trial);
      const double vt = et.squaredNorm();
      if (vt < value) {
        mu = std::move(trial);
        e = std::move(et);
        value = vt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return std::sqrt(value);
}

}  // namespace l12
