#include "l12/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "l12/parallel.hpp"

namespace l12::oracles {

namespace {

constexpr std::size_t kBruteForceCap = 30;

ReductionParams params_of(const ProblemInstance& inst) {
  return ReductionParams::make(inst.kind(), inst.tau(), inst.lambda());
}

}  // namespace

std::optional<PartitionCertificate> brute_force_partition(const PartitionInstance& S) {
  const std::size_t m = S.m();
  if (m > kBruteForceCap) {
    throw std::invalid_argument("brute-force partition is capped at m = 30");
  }
  // mask bit (m-1-i) set <=> element i goes to subset 2, so increasing masks
  // visit assignments in lexicographic order with subset 1 first.
  const std::uint64_t count = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::int64_t sum1 = 0;
    std::int64_t sum2 = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if ((mask >> (m - 1 - i)) & 1U) {
        sum2 += S[i];
      } else {
        sum1 += S[i];
      }
    }
    if (sum1 == sum2) {
      std::vector<bool> assignment(m);
      for (std::size_t i = 0; i < m; ++i) assignment[i] = ((mask >> (m - 1 - i)) & 1U) == 0;
      return PartitionCertificate{std::move(assignment), sum1, sum2};
    }
  }
  return std::nullopt;
}

double eval_partition_qp(const PartitionInstance& S, const Vector& u, const Vector& v) {
  const auto m = static_cast<Eigen::Index>(S.m());
  if (u.size() != m || v.size() != m) {
    throw std::invalid_argument("u and v must both have length m");
  }
  return -u.squaredNorm() - v.squaredNorm();
}

PatternMinimum enumerate_pattern_minimum(const ProblemInstance& inst, std::size_t cap) {
  if (!inst.source()) {
    throw std::invalid_argument("pattern enumeration needs an instance built by the reduction");
  }
  const auto& S = *inst.source();
  const std::size_t m = S.m();
  if (m > cap || m > 62) {
    std::ostringstream os;
    os << "m = " << m << " exceeds the pattern enumeration cap " << cap;
    throw std::invalid_argument(os.str());
  }
  const double c = closed_form_targets(m, params_of(inst)).c;
  const bool constrained = inst.has_equality_constraints();
  const std::uint64_t count = std::uint64_t{1} << m;
  constexpr double kTieTol = 1e-12;
  const auto near = [](double value, double best) {
    return value <= best + kTieTol * std::max(1.0, std::abs(best));
  };

  // Fixed chunking keeps the reduction independent of the thread count.
  const std::uint64_t chunks = std::min<std::uint64_t>(count, 256);
  struct Partial {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::uint64_t, double>> candidates;
  };
  std::vector<Partial> partials(chunks);
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::uint64_t begin = count * chunk / chunks;
    const std::uint64_t end = count * (chunk + 1) / chunks;
    Partial& part = partials[chunk];
    Vector x(2 * static_cast<Eigen::Index>(m));
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      x.setZero();
      std::int64_t diff = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const bool second = (mask >> (m - 1 - i)) & 1U;
        const auto k = static_cast<Eigen::Index>(i);
        x[second ? static_cast<Eigen::Index>(m) + k : k] = c;
        diff += second ? -S[i] : S[i];
      }
      if (constrained && diff != 0) continue;
      const double value = eval_objective(inst, CandidatePoint(x));
      if (value < part.best) {
        part.best = value;
        std::erase_if(part.candidates, [&](const auto& e) { return !near(e.second, value); });
      }
      if (near(value, part.best)) part.candidates.emplace_back(mask, value);
    }
  });

  PatternMinimum out;
  out.value = std::numeric_limits<double>::infinity();
  for (const auto& part : partials) out.value = std::min(out.value, part.best);
  if (!std::isfinite(out.value)) return out;
  for (const auto& part : partials) {
    for (const auto& [mask, value] : part.candidates) {
      if (!near(value, out.value)) continue;
      Vector x = Vector::Zero(2 * static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) {
        const bool second = (mask >> (m - 1 - i)) & 1U;
        x[static_cast<Eigen::Index>(second ? m + i : i)] = c;
      }
      out.argmins.emplace_back(std::move(x));
    }
  }
  return out;
}

double eval_g_w(const Vector& w, double tau, std::size_t m) {
  const double sq = w.squaredNorm();
  const double quart = w.array().square().square().sum();
  return 2.0 * sq - tau * std::sqrt(static_cast<double>(m) + 2.0 * sq + 2.0 * quart);
}

Vector grad_g_w(const Vector& w, double tau, std::size_t m) {
  const double sq = w.squaredNorm();
  const double quart = w.array().square().square().sum();
  const double root = std::sqrt(static_cast<double>(m) + 2.0 * sq + 2.0 * quart);
  Vector g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double wi = w[i];
    g[i] = 4.0 * wi - tau * (4.0 * wi + 8.0 * wi * wi * wi) / (2.0 * root);
  }
  return g;
}

double g_w_coercivity_bound(const Vector& w, double tau, std::size_t m) {
  const double r = w.norm();
  return (2.0 - std::numbers::sqrt2 * tau) * r * r - std::sqrt(static_cast<double>(m)) * tau -
         std::numbers::sqrt2 * tau * r;
}

GridSpec GridSpec::cube(Eigen::Index dim, double lo, double hi, double step) {
  GridSpec g;
  g.lower = Vector::Constant(dim, lo);
  g.upper = Vector::Constant(dim, hi);
  g.step = step;
  return g;
}

std::vector<std::uint64_t> GridSpec::axis_counts() const {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(lower.size()));
  for (Eigen::Index a = 0; a < lower.size(); ++a) {
    // The small slack absorbs representation error in (hi - lo)/step.
    const double span = (upper[a] - lower[a]) / step;
    counts[static_cast<std::size_t>(a)] = static_cast<std::uint64_t>(std::floor(span + 1e-9)) + 1;
  }
  return counts;
}

std::uint64_t GridSpec::total_points() const {
  std::uint64_t total = 1;
  for (auto c : axis_counts()) {
    if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= c;
  }
  return total;
}

void GridSpec::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("grid bounds must be non-empty and of equal length");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be > 0");
  if (!lower.allFinite() || !upper.allFinite() || (upper - lower).minCoeff() < 0.0) {
    throw std::invalid_argument("grid needs finite bounds with lower <= upper");
  }
  if (total_points() > max_points) {
    std::ostringstream os;
    os << "grid has " << total_points() << " points, cap is " << max_points;
    throw std::invalid_argument(os.str());
  }
}

GridResult grid_minimize(const ScalarField& f, const GridSpec& spec) {
  spec.validate();
  const auto counts = spec.axis_counts();
  const auto dim = static_cast<Eigen::Index>(counts.size());

  struct Slice {
    double value = std::numeric_limits<double>::infinity();
    Vector point;
  };
  // One slice per index of the first axis; the inner odometer runs the
  // remaining axes in lexicographic order, last axis fastest.
  std::vector<Slice> slices(counts[0]);
  parallel_for(counts[0], [&](std::size_t first) {
    Vector x(dim);
    std::vector<std::uint64_t> idx(counts.size(), 0);
    x[0] = spec.coordinate(0, first);
    for (Eigen::Index a = 1; a < dim; ++a) x[a] = spec.coordinate(a, 0);
    Slice& best = slices[first];
    while (true) {
      const double value = f(x);
      if (value < best.value) {
        best.value = value;
        best.point = x;
      }
      Eigen::Index a = dim - 1;
      for (; a >= 1; --a) {
        auto& i = idx[static_cast<std::size_t>(a)];
        if (++i < counts[static_cast<std::size_t>(a)]) {
          x[a] = spec.coordinate(a, i);
          break;
        }
        i = 0;
        x[a] = spec.coordinate(a, 0);
      }
      if (a < 1) break;
    }
  });

  GridResult out;
  out.value = std::numeric_limits<double>::infinity();
  for (auto& slice : slices) {
    if (slice.value < out.value) {
      out.value = slice.value;
      out.point = std::move(slice.point);
    }
  }
  if (out.point.size() == 0) throw std::domain_error("objective is NaN or +inf on the whole grid");
  return out;
}

Vector finite_diff_gradient(const ScalarField& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Vector gradient_descent(const ScalarField& f, const std::function<Vector(const Vector&)>& grad,
                        Vector x, int max_iters) {
  constexpr double kArmijo = 0.25;
  double fx = f(x);
  for (int it = 0; it < max_iters; ++it) {
    const Vector g = grad(x);
    const double gg = g.squaredNorm();
    if (gg == 0.0) break;
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-20) {
      Vector trial = x - step * g;
      const double ft = f(trial);
      if (ft <= fx - kArmijo * step * gg) {
        x = std::move(trial);
        fx = ft;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left
  }
  return x;
}

StationarityReport check_gw_unique_minimizer(double tau, std::size_t m, const GridSpec& spec,
                                             std::size_t n_starts, std::uint64_t seed) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const ScalarField g = [tau, m](const Vector& w) { return eval_g_w(w, tau, m); };
  const auto grad = [tau, m](const Vector& w) { return grad_g_w(w, tau, m); };

  StationarityReport report;
  const auto grid = grid_minimize(g, spec);
  report.point = grid.point;
  report.objective = grid.value;
  report.gradient_norm = grad_g_w(grid.point, tau, m).norm();

  const auto counts = spec.axis_counts();
  Vector nearest(spec.lower.size());
  for (Eigen::Index a = 0; a < spec.lower.size(); ++a) {
    const double raw = std::round(-spec.lower[a] / spec.step);
    const double hi = static_cast<double>(counts[static_cast<std::size_t>(a)] - 1);
    nearest[a] = spec.coordinate(a, static_cast<std::uint64_t>(std::clamp(raw, 0.0, hi)));
  }
  report.grid_min_at_origin = (grid.point - nearest).lpNorm<Eigen::Infinity>() == 0.0;

  std::vector<double> final_norms(n_starts);
  parallel_for(n_starts, [&](std::size_t s) {
    Rng rng(seed, s);
    Vector w0(spec.lower.size());
    for (Eigen::Index a = 0; a < w0.size(); ++a) w0[a] = rng.uniform(spec.lower[a], spec.upper[a]);
    final_norms[s] = gradient_descent(g, grad, std::move(w0)).norm();
  });
  report.starts = n_starts;
  report.max_final_norm =
      final_norms.empty() ? 0.0 : *std::max_element(final_norms.begin(), final_norms.end());
  report.descents_at_origin = report.max_final_norm <= 1e-6;
  report.converged_to_origin = report.grid_min_at_origin && report.descents_at_origin;
  return report;
}

bool check_coercivity_bound(double tau, std::size_t m, std::size_t samples, std::uint64_t seed) {
  const Vector origin = Vector::Zero(static_cast<Eigen::Index>(m));
  if (eval_g_w(origin, tau, m) < g_w_coercivity_bound(origin, tau, m)) return false;
  Rng rng(seed);
  Vector w(static_cast<Eigen::Index>(m));
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.normal();
    const double norm = w.norm();
    if (norm == 0.0) continue;
    w *= std::pow(10.0, rng.uniform(-6.0, 3.0)) / norm;
    const double lhs = eval_g_w(w, tau, m);
    const double rhs = g_w_coercivity_bound(w, tau, m);
    // Allow only floating-point noise relative to the magnitudes involved.
    if (lhs < rhs - 1e-12 * std::max(1.0, std::abs(rhs))) return false;
  }
  return true;
}

double eval_h_t(const Vector& t, double lambda) {
  if (t.size() > 0 && t.minCoeff() < 0.0) throw std::invalid_argument("h(t) needs t >= 0");
  return (t.array() - 1.0).square().sum() + lambda * (t.sum() - t.norm());
}

double kkt_residual_nup(const Vector& t, double lambda) {
  if (t.size() > 0 && t.minCoeff() < 0.0) throw std::invalid_argument("KKT residual needs t >= 0");
  const double norm = t.norm();
  if (norm == 0.0) {
    throw std::domain_error("t = 0 is not differentiable; compare h(0) directly");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double s = 2.0 * (t[i] - 1.0) + lambda - lambda * t[i] / norm;
    const double r = t[i] > 0.0 ? s : std::max(0.0, -s);
    sum += r * r;
  }
  return std::sqrt(sum);
}

double eval_up_lower_bound(const Vector& u, const Vector& v, double lambda) {
  if (u.size() != v.size()) throw std::invalid_argument("u and v differ in length");
  return (u + v - Vector::Ones(u.size())).squaredNorm() +
         lambda * (u.lpNorm<1>() + v.lpNorm<1>() - std::sqrt(u.squaredNorm() + v.squaredNorm()));
}

double eval_up_lower_bound(const Vector& x, double lambda) {
  const Eigen::Index m = x.size() / 2;
  const double* u = x.data();
  const double* v = x.data() + m;
  double fit = 0.0;
  double l1 = 0.0;
  double sq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = u[i] + v[i] - 1.0;
    fit += r * r;
    l1 += std::abs(u[i]) + std::abs(v[i]);
    sq += u[i] * u[i] + v[i] * v[i];
  }
  return fit + lambda * (l1 - std::sqrt(sq));
}

std::pair<Vector, Vector> exchange_point(const Vector& u, const Vector& v, std::size_t i,
                                         ExchangeCase which, double lambda) {
  const auto k = static_cast<Eigen::Index>(i);
  if (u.size() != v.size() || k >= u.size()) throw std::invalid_argument("bad exchange index");
  Vector nu = u;
  Vector nv = v;
  switch (which) {
    case ExchangeCase::NegativeSum:
      if (!(u[k] + v[k] < 0.0)) throw std::invalid_argument("exchange needs u_i + v_i < 0");
      nu[k] = -u[k];
      nv[k] = -v[k];
      break;
    case ExchangeCase::BothZero:
      if (u[k] != 0.0 || v[k] != 0.0) throw std::invalid_argument("exchange needs u_i = v_i = 0");
      nu[k] = 1.0 - 0.5 * lambda;
      nv[k] = 0.0;
      break;
    case ExchangeCase::BothPositive:
      if (!(u[k] > 0.0 && v[k] > 0.0)) throw std::invalid_argument("exchange needs u_i, v_i > 0");
      nu[k] = u[k] + v[k];
      nv[k] = 0.0;
      break;
  }
  return {std::move(nu), std::move(nv)};
}

CandidatePoint escape_box_sample(std::size_t m, double lambda, bool nonneg, EscapeCase which,
                                 Rng& rng) {
  const double md = static_cast<double>(m);
  const double box = 1.0 + std::sqrt(md) + 2.0 * md / lambda;
  const double small = 2.0 * md / lambda;
  const auto mi = static_cast<Eigen::Index>(m);
  const auto signed_value = [&](double magnitude) {
    return (nonneg || rng.coin()) ? magnitude : -magnitude;
  };
  // Strictly beyond a threshold: t (1 + 10^U(-6, 2)).
  const auto beyond = [&](double threshold) {
    return threshold * (1.0 + std::pow(10.0, rng.uniform(-6.0, 2.0)));
  };

  Vector x(2 * mi);
  for (Eigen::Index i = 0; i < 2 * mi; ++i) {
    x[i] = nonneg ? rng.uniform(0.0, box) : rng.uniform(-box, box);
  }
  const auto j = static_cast<Eigen::Index>(rng.below(m));
  const bool large_u = which == EscapeCase::LargeUSmallV || which == EscapeCase::LargeUBigV;
  const bool other_big = which == EscapeCase::LargeUBigV || which == EscapeCase::LargeVBigU;
  const double big = signed_value(beyond(box));
  const double other = signed_value(other_big ? beyond(small) : rng.uniform(0.0, small));
  x[large_u ? j : mi + j] = big;
  x[large_u ? mi + j : j] = other;
  return CandidatePoint(std::move(x));
}

bool check_escape_box(const ProblemInstance& inst, std::size_t samples, std::uint64_t seed) {
  if (inst.form() != ObjectiveForm::LeastSquaresL1L2 || !inst.source()) {
    throw std::invalid_argument("escape-box check needs a UP/NUP reduction instance");
  }
  const std::size_t m = inst.m();
  const double zero_value = static_cast<double>(m);
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto which = static_cast<EscapeCase>(1 + s % 4);
    const auto p = escape_box_sample(m, *inst.lambda(), inst.nonneg(), which, rng);
    if (!(eval_objective(inst, p) > zero_value)) return false;
  }
  return true;
}

}  // namespace l12::oracles
