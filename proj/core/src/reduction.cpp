#include "l12/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace l12 {

ReductionParams ReductionParams::make(ProblemKind kind, std::optional<double> tau,
                                      std::optional<double> lambda) {
  ReductionParams p{kind, {}, {}};
  switch (kind) {
    case ProblemKind::CP:
    case ProblemKind::NCP:
      p.tau = tau;
      break;
    case ProblemKind::UP:
    case ProblemKind::NUP:
      p.lambda = lambda;
      break;
    case ProblemKind::PQP:
      break;
    case ProblemKind::GENERIC:
      throw std::invalid_argument("GENERIC is not a reduction kind");
  }
  p.validate();
  return p;
}

void ReductionParams::validate() const {
  const bool wants_tau = kind == ProblemKind::CP || kind == ProblemKind::NCP;
  const bool wants_lambda = kind == ProblemKind::UP || kind == ProblemKind::NUP;
  if (kind == ProblemKind::GENERIC) {
    throw std::invalid_argument("GENERIC is not a reduction kind");
  }
  if (wants_tau && !tau) throw std::invalid_argument("kind requires tau");
  if (wants_lambda && !lambda) throw std::invalid_argument("kind requires lambda");
  if (!wants_tau && tau) throw std::invalid_argument("tau given for a kind that takes none");
  if (!wants_lambda && lambda) {
    throw std::invalid_argument("lambda given for a kind that takes none");
  }
  if ((tau && !std::isfinite(*tau)) || (lambda && !std::isfinite(*lambda))) {
    throw std::invalid_argument("non-finite tau/lambda");
  }
  if (lambda && *lambda <= 0.0) {
    // The escape box 1 + sqrt(m) + 2m/lambda and c(lambda) need lambda > 0.
    throw std::invalid_argument("lambda must be positive");
  }
}

double pattern_magnitude(std::size_t m, double lambda) {
  const double sm = std::sqrt(static_cast<double>(m));
  return 0.5 * (lambda / sm - lambda + 2.0);
}

double lower_bound_optimum(std::size_t m, double lambda) {
  const double md = static_cast<double>(m);
  return lambda * ((1.0 - lambda / 4.0) * md + (lambda / 2.0 - 1.0) * std::sqrt(md) - lambda / 4.0);
}

ClosedFormTargets closed_form_targets(std::size_t m, const ReductionParams& params) {
  if (m == 0) throw std::invalid_argument("closed-form targets need m >= 1");
  params.validate();
  const double md = static_cast<double>(m);
  ClosedFormTargets t;
  switch (params.kind) {
    case ProblemKind::PQP:
      t.c = 1.0;
      t.target_value = -md;
      break;
    case ProblemKind::CP:
    case ProblemKind::NCP:
      t.c = 1.0;
      t.target_value = md - *params.tau * std::sqrt(md);
      break;
    case ProblemKind::UP:
    case ProblemKind::NUP:
      t.c = pattern_magnitude(m, *params.lambda);
      t.target_value = lower_bound_optimum(m, *params.lambda);
      t.zero_point_value = md;
      t.escape_box = 1.0 + std::sqrt(md) + 2.0 * md / *params.lambda;
      break;
    case ProblemKind::GENERIC:
      break;
  }
  return t;
}

ProblemInstance build_instance(const PartitionInstance& S, const ReductionParams& params) {
  params.validate();
  const auto m = static_cast<Eigen::Index>(S.m());
  Matrix A = Matrix::Zero(m + 1, 2 * m);
  A.topLeftCorner(m, m).setIdentity();
  A.topRightCorner(m, m).setIdentity();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a = static_cast<double>(S[static_cast<std::size_t>(i)]);
    A(m, i) = a;
    A(m, m + i) = -a;
  }
  Vector b = Vector::Zero(m + 1);
  b.head(m).setOnes();
  return ProblemInstance::from_reduction(params.kind, std::move(A), std::move(b), params.tau,
                                         params.lambda, S);
}

PartitionCertificate PartitionCertificate::from_assignment(const PartitionInstance& S,
                                                           std::vector<bool> assignment) {
  if (assignment.size() != S.m()) {
    throw std::invalid_argument("assignment length does not match multiset size");
  }
  PartitionCertificate cert;
  for (std::size_t i = 0; i < S.m(); ++i) {
    if (assignment[i]) cert.sum1 += S[i];
  }
  cert.sum2 = S.total() - cert.sum1;
  cert.assignment = std::move(assignment);
  return cert;
}

std::string PartitionCertificate::describe(const PartitionInstance& S) const {
  std::ostringstream first;
  std::ostringstream second;
  bool f = true;
  bool s = true;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto& os = assignment[i] ? first : second;
    bool& fresh = assignment[i] ? f : s;
    if (!fresh) os << ',';
    os << S[i];
    fresh = false;
  }
  return "{" + first.str() + "}|{" + second.str() + "}";
}

PartitionCertificate decode_partition(const PartitionInstance& S, const CandidatePoint& p,
                                      const ClosedFormTargets& targets, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("decode tolerance must be positive");
  const auto [u, v] = split_uv(p, S.m());
  std::vector<bool> assignment(S.m());
  for (std::size_t i = 0; i < S.m(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const bool first = std::abs(u[k] - targets.c) <= tol && std::abs(v[k]) <= tol;
    const bool second = std::abs(v[k] - targets.c) <= tol && std::abs(u[k]) <= tol;
    if (!first && !second) {
      std::ostringstream os;
      os << "not a pattern point: (u, v)[" << i << "] = (" << u[k] << ", " << v[k]
         << ") is not within " << tol << " of (c, 0) or (0, c), c = " << targets.c;
      throw std::domain_error(os.str());
    }
    assignment[i] = first;
  }
  return PartitionCertificate::from_assignment(S, std::move(assignment));
}

DecideMethod parse_decide_method(std::string_view name) {
  if (name == "pattern") return DecideMethod::Pattern;
  if (name == "solver") return DecideMethod::Solver;
  throw std::invalid_argument("unknown decide method '" + std::string(name) + "'");
}

std::string_view to_string(Answer a) noexcept { return a == Answer::Yes ? "YES" : "NO"; }

namespace {

struct BestImbalance {
  std::uint64_t key = 0;  // element 0 in the most significant bit; set bit = subset 2
  std::int64_t imbalance = 0;
};

// Gray-code walk over all 2^m sign patterns keeping the smallest |sum1 - sum2|
// and, among ties, the lexicographically smallest assignment.
BestImbalance min_imbalance(const PartitionInstance& S) {
  const std::size_t m = S.m();
  std::int64_t diff = S.total();  // all elements in subset 1
  std::uint64_t gray = 0;
  BestImbalance best{0, std::abs(diff)};
  const std::uint64_t count = std::uint64_t{1} << m;
  for (std::uint64_t k = 1; k < count; ++k) {
    const auto j = static_cast<std::size_t>(__builtin_ctzll(k));
    gray ^= std::uint64_t{1} << j;
    const std::int64_t a2 = 2 * S[j];
    diff += (gray >> j & 1U) ? -a2 : a2;
    const std::int64_t imbalance = diff < 0 ? -diff : diff;
    if (imbalance > best.imbalance) continue;
    // Reverse bit order so element 0 is most significant.
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < m; ++i) key |= (gray >> i & 1U) << (m - 1 - i);
    if (imbalance < best.imbalance || key < best.key) best = {key, imbalance};
  }
  return best;
}

CandidatePoint pattern_point(const std::vector<bool>& assignment, double c) {
  const auto m = static_cast<Eigen::Index>(assignment.size());
  Vector x = Vector::Zero(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x[assignment[static_cast<std::size_t>(i)] ? i : m + i] = c;
  }
  return CandidatePoint(std::move(x));
}

Decision decide_by_patterns(const PartitionInstance& S, const ReductionParams& params,
                            const DecideOptions& options) {
  if (S.m() > options.pattern_cap || S.m() > 62) {
    std::ostringstream os;
    os << "m = " << S.m() << " exceeds the pattern enumeration cap " << options.pattern_cap;
    throw std::invalid_argument(os.str());
  }
  const auto targets = closed_form_targets(S.m(), params);
  const auto inst = build_instance(S, params);
  const auto best = min_imbalance(S);

  std::vector<bool> assignment(S.m());
  for (std::size_t i = 0; i < S.m(); ++i) {
    assignment[i] = ((best.key >> (S.m() - 1 - i)) & 1U) == 0;
  }

  Decision d;
  d.target_value = targets.target_value;
  const bool constrained = inst.has_equality_constraints();
  if (constrained && best.imbalance != 0) {
    // No pattern satisfies a^T (u - v) = 0.
    d.achieved_value = std::numeric_limits<double>::infinity();
  } else {
    auto point = pattern_point(assignment, targets.c);
    d.achieved_value = eval_objective(inst, point);
    d.witness = std::move(point);
  }
  d.gap = d.achieved_value - d.target_value;
  auto cert = PartitionCertificate::from_assignment(S, std::move(assignment));
  d.answer = best.imbalance == 0 ? Answer::Yes : Answer::No;
  if (d.answer == Answer::Yes) d.certificate = std::move(cert);
  return d;
}

Decision decide_by_solver(const PartitionInstance& S, const ReductionParams& params, double tol,
                          const DecideOptions& options) {
  const auto targets = closed_form_targets(S.m(), params);
  const auto inst = build_instance(S, params);
  const auto report = multi_start_solve(inst, options.solver);

  Decision d;
  d.target_value = targets.target_value;
  d.achieved_value = report.best_value;
  d.gap = d.achieved_value - d.target_value;
  d.witness = report.best_point;
  try {
    d.certificate = decode_partition(S, report.best_point, targets, tol);
  } catch (const std::domain_error&) {
    d.certificate.reset();
  }
  const bool feasible = !inst.has_equality_constraints() || report.converged;
  const bool yes = feasible && d.achieved_value <= d.target_value + tol && d.certificate &&
                   d.certificate->balanced();
  d.answer = yes ? Answer::Yes : Answer::No;
  return d;
}

}  // namespace

Decision decide_partition(const PartitionInstance& S, const ReductionParams& params,
                          DecideMethod method, double tol, const DecideOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("decision tolerance must be positive");
  params.validate();
  return method == DecideMethod::Pattern ? decide_by_patterns(S, params, options)
                                         : decide_by_solver(S, params, tol, options);
}

}  // namespace l12
