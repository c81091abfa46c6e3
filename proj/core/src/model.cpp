#include "l12/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace l12 {

namespace {

void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(what) + " has non-finite entries");
  }
}

void require_length(const ProblemInstance& inst, const CandidatePoint& p) {
  if (p.size() != inst.cols()) {
    std::ostringstream os;
    os << "point length " << p.size() << " does not match instance column count "
       << inst.cols();
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

PartitionInstance::PartitionInstance(std::vector<std::int64_t> elements)
    : elements_(std::move(elements)) {
  if (elements_.empty()) {
    throw std::invalid_argument("partition multiset must contain at least one element");
  }
  // Every subset sum is bounded by sum |a_i|.
  std::uint64_t abs_total = 0;
  for (auto a : elements_) {
    if (a > kMaxMagnitude || a < -kMaxMagnitude) {
      throw std::invalid_argument("partition element exceeds 2^53 in magnitude");
    }
    abs_total += static_cast<std::uint64_t>(a < 0 ? -a : a);
    if (abs_total > static_cast<std::uint64_t>(kMaxMagnitude)) {
      throw std::invalid_argument("sum of |a_i| exceeds 2^53; subset sums would not be exact");
    }
    total_ += a;
  }
}

PartitionInstance PartitionInstance::scaled(std::int64_t k) const {
  std::vector<std::int64_t> out;
  out.reserve(elements_.size());
  for (auto a : elements_) {
    std::int64_t v = 0;
    if (__builtin_mul_overflow(a, k, &v)) {
      throw std::invalid_argument("scaled partition element overflows");
    }
    out.push_back(v);
  }
  return PartitionInstance(std::move(out));
}

std::string_view to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::CP: return "cp";
    case ProblemKind::NCP: return "ncp";
    case ProblemKind::UP: return "up";
    case ProblemKind::NUP: return "nup";
    case ProblemKind::PQP: return "pqp";
    case ProblemKind::GENERIC: return "generic";
  }
  return "generic";
}

ProblemKind parse_problem_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto k : {ProblemKind::CP, ProblemKind::NCP, ProblemKind::UP, ProblemKind::NUP,
                 ProblemKind::PQP, ProblemKind::GENERIC}) {
    if (lower == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown problem kind '" + std::string(name) + "'");
}

CandidatePoint::CandidatePoint(Vector x) : x_(std::move(x)) {
  require_finite(x_, "candidate point");
}

CandidatePoint CandidatePoint::from_uv(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("u and v differ in length");
  Vector x(u.size() + v.size());
  x << u, v;
  return CandidatePoint(std::move(x));
}

std::pair<Vector, Vector> split_uv(const CandidatePoint& p, std::size_t m) {
  const auto mi = static_cast<Eigen::Index>(m);
  if (p.size() != 2 * mi) {
    std::ostringstream os;
    os << "cannot split point of length " << p.size() << " into (u, v) with m = " << m;
    throw std::invalid_argument(os.str());
  }
  return {p.x().head(mi), p.x().tail(mi)};
}

ProblemInstance ProblemInstance::from_reduction(ProblemKind kind, Matrix A, Vector b,
                                                std::optional<double> tau,
                                                std::optional<double> lambda,
                                                PartitionInstance source) {
  if (kind == ProblemKind::GENERIC) {
    throw std::invalid_argument("reduction instances cannot have kind GENERIC");
  }
  const bool wants_tau = kind == ProblemKind::CP || kind == ProblemKind::NCP;
  const bool wants_lambda = kind == ProblemKind::UP || kind == ProblemKind::NUP;
  if (wants_tau != tau.has_value() || wants_lambda != lambda.has_value()) {
    throw std::invalid_argument("parameters do not match problem kind " +
                                std::string(to_string(kind)));
  }
  const auto m = static_cast<Eigen::Index>(source.m());
  if (A.rows() != m + 1 || A.cols() != 2 * m || b.size() != m + 1) {
    throw std::invalid_argument("reduction matrix has wrong shape");
  }
  ProblemInstance inst;
  inst.kind_ = kind;
  inst.A_ = std::move(A);
  inst.b_ = std::move(b);
  inst.tau_ = tau;
  inst.lambda_ = lambda;
  inst.nonneg_ = kind == ProblemKind::NCP || kind == ProblemKind::NUP || kind == ProblemKind::PQP;
  inst.source_ = std::move(source);
  inst.check_parameter_range();
  return inst;
}

ProblemInstance ProblemInstance::generic(Matrix A, Vector b, std::optional<double> tau,
                                         std::optional<double> lambda, bool nonneg) {
  if (tau.has_value() == lambda.has_value()) {
    throw std::invalid_argument("generic instance needs exactly one of tau or lambda");
  }
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("empty matrix");
  if (A.rows() != b.size()) throw std::invalid_argument("b length does not match A rows");
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("non-finite A or b");
  ProblemInstance inst;
  inst.kind_ = ProblemKind::GENERIC;
  inst.A_ = std::move(A);
  inst.b_ = std::move(b);
  inst.tau_ = tau;
  inst.lambda_ = lambda;
  inst.nonneg_ = nonneg;
  inst.check_parameter_range();
  return inst;
}

void ProblemInstance::check_parameter_range() {
  for (auto p : {tau_, lambda_}) {
    if (p && !std::isfinite(*p)) throw std::invalid_argument("non-finite tau/lambda");
  }
  std::ostringstream warn;
  switch (kind_) {
    case ProblemKind::CP:
      if (*tau_ < 1.0 / std::sqrt(2.0) || *tau_ >= std::sqrt(2.0)) {
        warn << "tau = " << *tau_ << " outside [1/sqrt(2), sqrt(2))";
      }
      break;
    case ProblemKind::NCP:
      if (*tau_ <= 0.0) warn << "tau = " << *tau_ << " is not positive";
      break;
    case ProblemKind::UP:
    case ProblemKind::NUP:
      if (*lambda_ <= 0.0 || *lambda_ >= 2.0) {
        warn << "lambda = " << *lambda_ << " outside (0, 2)";
      }
      break;
    case ProblemKind::PQP:
    case ProblemKind::GENERIC:
      break;
  }
  range_warning_ = warn.str();
  out_of_range_ = !range_warning_.empty();
}

ObjectiveForm ProblemInstance::form() const noexcept {
  switch (kind_) {
    case ProblemKind::UP:
    case ProblemKind::NUP:
      return ObjectiveForm::LeastSquaresL1L2;
    case ProblemKind::CP:
    case ProblemKind::NCP:
      return ObjectiveForm::ConstrainedL1L2;
    case ProblemKind::PQP:
      return ObjectiveForm::NegativeSquares;
    case ProblemKind::GENERIC:
      return lambda_ ? ObjectiveForm::LeastSquaresL1L2 : ObjectiveForm::ConstrainedL1L2;
  }
  return ObjectiveForm::ConstrainedL1L2;
}

double l1_minus_l2(const Vector& x, double tau) {
  return x.lpNorm<1>() - tau * x.norm();
}

double eval_objective(const ProblemInstance& inst, const CandidatePoint& p) {
  require_length(inst, p);
  const Vector& x = p.x();
  switch (inst.form()) {
    case ObjectiveForm::LeastSquaresL1L2:
      return (inst.A() * x - inst.b()).squaredNorm() + *inst.lambda() * l1_minus_l2(x);
    case ObjectiveForm::ConstrainedL1L2:
      return l1_minus_l2(x, *inst.tau());
    case ObjectiveForm::NegativeSquares:
      return -x.squaredNorm();
  }
  return 0.0;
}

EvaluationResult eval_feasibility(const ProblemInstance& inst, const CandidatePoint& p) {
  EvaluationResult r;
  r.objective = eval_objective(inst, p);
  if (inst.has_equality_constraints()) {
    r.equality_residual = (inst.A() * p.x() - inst.b()).lpNorm<Eigen::Infinity>();
  }
  if (inst.nonneg() && p.size() > 0) {
    r.nonneg_violation = std::max(0.0, -p.x().minCoeff());
  }
  return r;
}

}  // namespace l12
