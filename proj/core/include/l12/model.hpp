#pragma once

// Problem and solution data types for L1-L2 regularized sparse linear
// reconstruction, plus evaluators for every objective and constraint set.
//
//   CP   : min ||x||_1 - tau ||x||_2            s.t. Ax = b
//   NCP  : min ||x||_1 - tau ||x||_2            s.t. Ax = b, x >= 0
//   UP   : min ||Ax - b||^2 + lambda (||x||_1 - ||x||_2)
//   NUP  : min ||Ax - b||^2 + lambda (||x||_1 - ||x||_2)   s.t. x >= 0
//   PQP  : min sum_i -u_i^2 - v_i^2             s.t. Ax = b, x >= 0
//
// GENERIC instances carry a user matrix and exactly one of tau (constrained
// form) or lambda (least-squares form).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace l12 {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Multiset S = {a_1, ..., a_m} of exact integers.
class PartitionInstance {
 public:
  /// Largest |a_i| accepted; every element and every subset sum stays exact
  /// in both int64 and double.
  static constexpr std::int64_t kMaxMagnitude = std::int64_t{1} << 53;

  explicit PartitionInstance(std::vector<std::int64_t> elements);

  const std::vector<std::int64_t>& elements() const noexcept { return elements_; }
  std::size_t m() const noexcept { return elements_.size(); }
  std::int64_t operator[](std::size_t i) const { return elements_[i]; }
  std::int64_t total() const noexcept { return total_; }

  /// Returns a copy with every element multiplied by k.
  PartitionInstance scaled(std::int64_t k) const;

  friend bool operator==(const PartitionInstance&, const PartitionInstance&) = default;

 private:
  std::vector<std::int64_t> elements_;
  std::int64_t total_ = 0;
};

enum class ProblemKind { CP, NCP, UP, NUP, PQP, GENERIC };

std::string_view to_string(ProblemKind kind) noexcept;
/// Parses "cp", "ncp", "up", "nup", "pqp", "generic" (case-insensitive).
ProblemKind parse_problem_kind(std::string_view name);

/// Objective family actually evaluated for an instance.
enum class ObjectiveForm {
  LeastSquaresL1L2,  // UP, NUP, GENERIC with lambda
  ConstrainedL1L2,   // CP, NCP, GENERIC with tau
  NegativeSquares,   // PQP
};

/// A point x in R^n. For reduction instances x = (u, v) with n = 2m.
class CandidatePoint {
 public:
  CandidatePoint() = default;
  explicit CandidatePoint(Vector x);
  static CandidatePoint from_uv(const Vector& u, const Vector& v);

  const Vector& x() const noexcept { return x_; }
  Eigen::Index size() const noexcept { return x_.size(); }
  double operator[](Eigen::Index i) const { return x_[i]; }

 private:
  Vector x_;
};

/// Splits x = (u, v). Throws std::invalid_argument unless len(x) = 2m.
std::pair<Vector, Vector> split_uv(const CandidatePoint& p, std::size_t m);

class ProblemInstance {
 public:
  /// Instance built from a partition multiset (used by the reduction).
  static ProblemInstance from_reduction(ProblemKind kind, Matrix A, Vector b,
                                        std::optional<double> tau,
                                        std::optional<double> lambda,
                                        PartitionInstance source);

  /// User-supplied instance. Exactly one of tau / lambda must be set.
  static ProblemInstance generic(Matrix A, Vector b, std::optional<double> tau,
                                 std::optional<double> lambda, bool nonneg);

  ProblemKind kind() const noexcept { return kind_; }
  ObjectiveForm form() const noexcept;
  const Matrix& A() const noexcept { return A_; }
  const Vector& b() const noexcept { return b_; }
  std::optional<double> tau() const noexcept { return tau_; }
  std::optional<double> lambda() const noexcept { return lambda_; }
  bool nonneg() const noexcept { return nonneg_; }
  bool has_equality_constraints() const noexcept {
    return form() != ObjectiveForm::LeastSquaresL1L2;
  }
  const std::optional<PartitionInstance>& source() const noexcept { return source_; }
  std::size_t m() const { return source_ ? source_->m() : 0; }
  Eigen::Index cols() const noexcept { return A_.cols(); }
  Eigen::Index rows() const noexcept { return A_.rows(); }

  /// Set when tau / lambda lies outside the range where the reduction's
  /// value equivalences are known to hold (tau in [1/sqrt2, sqrt2) for CP,
  /// tau > 0 for NCP, lambda in (0, 2) for UP/NUP).
  bool parameter_out_of_range() const noexcept { return out_of_range_; }
  const std::string& range_warning() const noexcept { return range_warning_; }

 private:
  ProblemInstance() = default;
  void check_parameter_range();

  ProblemKind kind_ = ProblemKind::GENERIC;
  Matrix A_;
  Vector b_;
  std::optional<double> tau_;
  std::optional<double> lambda_;
  bool nonneg_ = false;
  std::optional<PartitionInstance> source_;
  bool out_of_range_ = false;
  std::string range_warning_;
};

struct EvaluationResult {
  double objective = 0.0;
  double equality_residual = 0.0;  // ||Ax - b||_inf, constrained forms only
  double nonneg_violation = 0.0;   // max(0, -min_i x_i), nonneg kinds only
};

double l1_minus_l2(const Vector& x, double tau = 1.0);

/// Objective of the instance's kind at p. For constrained kinds feasibility
/// is not taken into account.
double eval_objective(const ProblemInstance& inst, const CandidatePoint& p);

EvaluationResult eval_feasibility(const ProblemInstance& inst, const CandidatePoint& p);

}  // namespace l12
