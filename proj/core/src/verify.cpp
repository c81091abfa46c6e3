#include "l12/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "l12/oracles.hpp"
#include "l12/parallel.hpp"
#include "l12/random.hpp"
#include "l12/reduction.hpp"
#include "l12/solvers.hpp"

namespace l12::verify {

namespace {

constexpr std::uint64_t kCorpusSeed = 20240229;
constexpr std::size_t kCorpusSize = 200;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}

  // Runs body, which fills `detail` and returns pass/fail; exceptions fail
  // the check with their message.
  void check(std::string name, const std::function<bool(std::ostringstream&)>& body) {
    CheckResult r;
    r.suite = name_;
    r.name = std::move(name);
    std::ostringstream detail;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.passed = body(detail);
    } catch (const std::exception& e) {
      r.passed = false;
      detail << "exception: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.detail = detail.str();
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::string name_;
  std::vector<CheckResult> results_;
};

bool is_yes(const PartitionInstance& S) { return oracles::brute_force_partition(S).has_value(); }

std::vector<bool> corpus_answers() {
  const auto& corpus = standard_corpus();
  std::vector<bool> yes(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) yes[i] = is_yes(corpus[i]);
  return yes;
}

// Pattern minimum vs brute force over the corpus for one parameter set.
// `matches_target` classifies the pattern minimum as "attains the target";
// `extra` adds a per-instance condition for NO instances.
void corpus_equivalence(Suite& suite, const std::string& name, const ReductionParams& params,
                        const std::function<bool(double value, double target)>& matches_target,
                        const std::function<bool(double value, double target, std::size_t m)>&
                            no_condition = {}) {
  suite.check(name, [&](std::ostringstream& os) {
    const auto& corpus = standard_corpus();
    const auto yes = corpus_answers();
    std::size_t agree = 0;
    std::size_t no_ok = 0;
    std::size_t no_count = 0;
    double worst_yes_error = 0.0;
    double min_no_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& S = corpus[i];
      const auto inst = build_instance(S, params);
      const double target = closed_form_targets(S.m(), params).target_value;
      const double value = oracles::enumerate_pattern_minimum(inst).value;
      const bool hit = matches_target(value, target);
      if (hit == yes[i]) ++agree;
      if (yes[i] && std::isfinite(value)) {
        worst_yes_error = std::max(worst_yes_error, std::abs(value - target));
      }
      if (!yes[i]) {
        ++no_count;
        min_no_gap = std::min(min_no_gap, value - target);
        if (!no_condition || no_condition(value, target, S.m())) ++no_ok;
      }
    }
    os << "agree " << agree << "/" << corpus.size() << ", max |value - target| on YES "
       << fmt(worst_yes_error) << ", min NO gap " << fmt(min_no_gap);
    if (no_condition) os << ", NO gap condition " << no_ok << "/" << no_count;
    return agree == corpus.size() && no_ok == no_count;
  });
}

void corpus_stats(Suite& suite) {
  suite.check("corpus", [](std::ostringstream& os) {
    const auto& corpus = standard_corpus();
    const auto yes = corpus_answers();
    const auto n_yes = static_cast<std::size_t>(std::count(yes.begin(), yes.end(), true));
    std::size_t min_m = 64;
    std::size_t max_m = 0;
    std::int64_t min_a = std::numeric_limits<std::int64_t>::max();
    std::int64_t max_a = std::numeric_limits<std::int64_t>::min();
    for (const auto& S : corpus) {
      min_m = std::min(min_m, S.m());
      max_m = std::max(max_m, S.m());
      for (auto a : S.elements()) {
        min_a = std::min(min_a, a);
        max_a = std::max(max_a, a);
      }
    }
    os << corpus.size() << " multisets, " << n_yes << " YES, " << corpus.size() - n_yes
       << " NO, m in [" << min_m << ", " << max_m << "], elements in [" << min_a << ", "
       << max_a << "]";
    return corpus.size() == kCorpusSize && n_yes >= 80 && corpus.size() - n_yes >= 80 &&
           min_m >= 2 && max_m <= 12 && min_a >= 0 && max_a <= 50;
  });
}

void suite_prop21(Suite& s) {
  corpus_stats(s);
  corpus_equivalence(s, "pqp pattern minimum = -m iff YES", ReductionParams::pqp(),
                     [](double value, double target) { return value == target; });
}

void suite_constrained(Suite& s, ProblemKind kind) {
  for (double tau : kTauGrid) {
    const auto params = ReductionParams::make(kind, tau, {});
    corpus_equivalence(s,
                       std::string(to_string(kind)) + " tau=" + fmt(tau) +
                           ": pattern minimum = m - tau sqrt(m) iff YES",
                       params, [](double value, double target) {
                         return std::abs(value - target) <= 1e-12;
                       });
  }
}

void suite_unconstrained(Suite& s, ProblemKind kind) {
  for (double lambda : kLambdaGrid) {
    const auto params = ReductionParams::make(kind, {}, lambda);
    corpus_equivalence(
        s,
        std::string(to_string(kind)) + " lambda=" + fmt(lambda) +
            ": pattern minimum = g*(lambda) iff YES",
        params, [](double value, double target) { return std::abs(value - target) <= 1e-10; },
        [lambda](double value, double target, std::size_t m) {
          const double c = pattern_magnitude(m, lambda);
          return value - target >= 0.9 * c * c;
        });
  }
}

void suite_lemma23(Suite& s, std::uint64_t seed) {
  for (double tau : kTauGrid) {
    for (std::size_t m : {1, 2, 3, 5}) {
      for (Eigen::Index k : {1, 2}) {
        std::ostringstream label;
        label << "tau=" << fmt(tau) << " m=" << m << " k=" << k;
        const auto spec = oracles::GridSpec::cube(k, -3.0, 3.0, k == 1 ? 1e-3 : 1e-2);
        s.check("unique minimizer at 0, " + label.str(), [&](std::ostringstream& os) {
          const auto r = oracles::check_gw_unique_minimizer(tau, m, spec, 100, seed);
          os << "grid argmin " << (r.grid_min_at_origin ? "at" : "not at")
             << " the grid point nearest 0, max final |w| over " << r.starts << " descents "
             << fmt(r.max_final_norm);
          return r.converged_to_origin;
        });
        s.check("gradient vs finite differences, " + label.str(), [&](std::ostringstream& os) {
          const oracles::ScalarField g = [&](const Vector& w) {
            return oracles::eval_g_w(w, tau, m);
          };
          Rng rng(seed, 1000 + m * 10 + static_cast<std::uint64_t>(k));
          double worst = 0.0;
          Vector w(k);
          for (int p = 0; p < 100; ++p) {
            for (Eigen::Index i = 0; i < k; ++i) w[i] = rng.uniform(-3.0, 3.0);
            const Vector an = oracles::grad_g_w(w, tau, m);
            const Vector fd = oracles::finite_diff_gradient(g, w);
            worst = std::max(worst, (fd - an).lpNorm<Eigen::Infinity>() /
                                        std::max(1.0, an.lpNorm<Eigen::Infinity>()));
          }
          os << "max relative error " << fmt(worst) << " over 100 points";
          return worst <= 1e-5;
        });
      }
    }
    s.check("coercivity bound, tau=" + fmt(tau), [&](std::ostringstream& os) {
      bool ok = true;
      for (std::size_t m : {1, 2, 3, 5}) {
        ok = ok && oracles::check_coercivity_bound(tau, m, 10000, seed + m);
      }
      os << "10000 samples per m in {1, 2, 3, 5}";
      return ok;
    });
  }
}

void suite_lemma33(Suite& s) {
  constexpr std::array<double, 5> lambdas = {0.1, 0.5, 1.0, 1.5, 1.9};
  s.check("KKT point and value at c(lambda) 1_m", [&](std::ostringstream& os) {
    double worst_kkt = 0.0;
    double worst_value = 0.0;
    for (double lambda : lambdas) {
      for (std::size_t m = 1; m <= 8; ++m) {
        const Vector t = Vector::Constant(static_cast<Eigen::Index>(m), pattern_magnitude(m, lambda));
        worst_kkt = std::max(worst_kkt, oracles::kkt_residual_nup(t, lambda));
        worst_value = std::max(worst_value, std::abs(oracles::eval_h_t(t, lambda) -
                                                     lower_bound_optimum(m, lambda)));
      }
    }
    os << "max KKT residual " << fmt(worst_kkt) << ", max |h - g*| " << fmt(worst_value)
       << " over lambda in {0.1, 0.5, 1, 1.5, 1.9} x m in 1..8";
    return worst_kkt <= 1e-12 && worst_value <= 1e-12;
  });
  for (double lambda : lambdas) {
    for (std::size_t m : {1, 2}) {
      std::ostringstream label;
      label << "grid minimum of h, lambda=" << fmt(lambda) << " m=" << m;
      s.check(label.str(), [&](std::ostringstream& os) {
        const oracles::ScalarField h = [lambda](const Vector& t) {
          return oracles::eval_h_t(t, lambda);
        };
        const auto grid =
            oracles::grid_minimize(h, oracles::GridSpec::cube(static_cast<Eigen::Index>(m), 0.0,
                                                              2.0, 1e-3));
        const double target = lower_bound_optimum(m, lambda);
        const double c = pattern_magnitude(m, lambda);
        const double dist = (grid.point.array() - c).abs().maxCoeff();
        os << "min " << fmt(grid.value) << " vs g* " << fmt(target) << ", argmin distance "
           << fmt(dist) << " from c 1_m";
        return std::abs(grid.value - target) <= 1e-4 && dist <= 2e-3;
      });
    }
  }
}

void suite_lemma37(Suite& s, std::uint64_t seed) {
  constexpr std::array<oracles::ExchangeCase, 3> cases = {oracles::ExchangeCase::NegativeSum,
                                                          oracles::ExchangeCase::BothZero,
                                                          oracles::ExchangeCase::BothPositive};
  constexpr std::array<const char*, 3> names = {"u_i + v_i < 0", "u_i = v_i = 0",
                                                "u_i, v_i > 0"};
  constexpr int kSamples = 10000;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (std::size_t m : {2, 4}) {
      for (double lambda : kLambdaGrid) {
        std::ostringstream label;
        label << "exchange decreases g, " << names[c] << ", m=" << m << " lambda=" << fmt(lambda);
        s.check(label.str(), [&](std::ostringstream& os) {
          Rng rng(seed, 100 * c + 10 * m + static_cast<std::uint64_t>(lambda * 2));
          const auto mi = static_cast<Eigen::Index>(m);
          Vector u(mi);
          Vector v(mi);
          int decreased = 0;
          for (int n = 0; n < kSamples; ++n) {
            for (Eigen::Index i = 0; i < mi; ++i) {
              u[i] = rng.uniform(-3.0, 3.0);
              v[i] = rng.uniform(-3.0, 3.0);
            }
            const auto i = static_cast<Eigen::Index>(rng.below(m));
            switch (cases[c]) {
              case oracles::ExchangeCase::NegativeSum:
                while (!(u[i] + v[i] < 0.0)) {
                  u[i] = rng.uniform(-3.0, 3.0);
                  v[i] = rng.uniform(-3.0, 3.0);
                }
                break;
              case oracles::ExchangeCase::BothZero:
                u[i] = 0.0;
                v[i] = 0.0;
                break;
              case oracles::ExchangeCase::BothPositive:
                u[i] = 3.0 - rng.uniform(0.0, 3.0);  // (0, 3]
                v[i] = 3.0 - rng.uniform(0.0, 3.0);
                break;
            }
            const double before = oracles::eval_up_lower_bound(u, v, lambda);
            const auto [nu, nv] =
                oracles::exchange_point(u, v, static_cast<std::size_t>(i), cases[c], lambda);
            if (oracles::eval_up_lower_bound(nu, nv, lambda) < before) ++decreased;
          }
          os << decreased << "/" << kSamples << " samples strictly decreased";
          return decreased == kSamples;
        });
      }
    }
  }
}

PartitionInstance escape_box_multiset(std::size_t m) {
  Rng rng(kCorpusSeed, 5000 + m);
  std::vector<std::int64_t> a(m);
  for (auto& x : a) x = static_cast<std::int64_t>(rng.below(51));
  return PartitionInstance(std::move(a));
}

void suite_prop31(Suite& s, std::uint64_t seed) {
  for (std::size_t m : {2, 4, 8}) {
    for (double lambda : kLambdaGrid) {
      for (ProblemKind kind : {ProblemKind::UP, ProblemKind::NUP}) {
        std::ostringstream label;
        label << "outside the escape box f > m, " << to_string(kind) << " m=" << m
              << " lambda=" << fmt(lambda);
        s.check(label.str(), [&](std::ostringstream& os) {
          const auto S = escape_box_multiset(m);
          const auto inst = build_instance(S, ReductionParams::make(kind, {}, lambda));
          const double box = *closed_form_targets(m, ReductionParams::make(kind, {}, lambda))
                                  .escape_box;
          os << "10000 stratified samples beyond box " << fmt(box) << ", S = {";
          for (std::size_t i = 0; i < m; ++i) os << (i ? "," : "") << S[i];
          os << "}";
          return oracles::check_escape_box(inst, 10000, seed + m);
        });
      }
    }
  }
}

// Distance (infinity norm) from x = (u, v) to the nearest point with
// (u_i, v_i) in {(c, 0), (0, c)} for every i.
double distance_to_patterns(const Vector& x, double c) {
  const Eigen::Index m = x.size() / 2;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double first = std::max(std::abs(x[i] - c), std::abs(x[m + i]));
    const double second = std::max(std::abs(x[i]), std::abs(x[m + i] - c));
    worst = std::max(worst, std::min(first, second));
  }
  return worst;
}

void suite_global(Suite& s) {
  for (std::size_t m : {1, 2}) {
    for (double lambda : kLambdaGrid) {
      std::ostringstream label;
      const double step = m == 1 ? 0.002 : 0.02;
      label << "grid minimum of g(u,v), m=" << m << " lambda=" << fmt(lambda) << " step=" << step;
      s.check(label.str(), [&](std::ostringstream& os) {
        const oracles::ScalarField g = [lambda](const Vector& x) {
          return oracles::eval_up_lower_bound(x, lambda);
        };
        auto spec = oracles::GridSpec::cube(2 * static_cast<Eigen::Index>(m), -2.0, 2.0, step);
        spec.max_points = 2'000'000'000;
        const auto grid = oracles::grid_minimize(g, spec);
        const double target = lower_bound_optimum(m, lambda);
        const double dist = distance_to_patterns(grid.point, pattern_magnitude(m, lambda));
        os << spec.total_points() << " points, min " << fmt(grid.value) << " vs g* "
           << fmt(target) << ", argmin distance " << fmt(dist) << " from Y*";
        return std::abs(grid.value - target) <= 1e-3 && dist <= step;
      });
    }
  }
}

std::vector<ReductionParams> all_params() {
  std::vector<ReductionParams> out = {ReductionParams::pqp()};
  for (double tau : kTauGrid) out.push_back(ReductionParams::cp(tau));
  for (double tau : kTauGrid) out.push_back(ReductionParams::ncp(tau));
  for (double lambda : kLambdaGrid) out.push_back(ReductionParams::up(lambda));
  for (double lambda : kLambdaGrid) out.push_back(ReductionParams::nup(lambda));
  return out;
}

std::string label_of(const ReductionParams& p) {
  std::string out(to_string(p.kind));
  if (p.tau) out += " tau=" + fmt(*p.tau);
  if (p.lambda) out += " lambda=" + fmt(*p.lambda);
  return out;
}

void suite_solver(Suite& s, std::uint64_t seed) {
  SolverOptions opts;
  opts.n_starts = 50;
  opts.seed = seed;
  opts.init_strategy = InitStrategy::PerturbedPattern;

  // Reduction instances of the corpus with m <= 6 for every kind and
  // parameter, plus the escape-box instances.
  struct Job {
    PartitionInstance S;
    ReductionParams params;
  };
  std::vector<Job> jobs;
  for (const auto& S : standard_corpus()) {
    if (S.m() > 6) continue;
    for (const auto& p : all_params()) jobs.push_back({S, p});
  }
  for (std::size_t m : {2, 4, 8}) {
    for (double lambda : kLambdaGrid) {
      jobs.push_back({escape_box_multiset(m), ReductionParams::up(lambda)});
      jobs.push_back({escape_box_multiset(m), ReductionParams::nup(lambda)});
    }
  }

  struct Outcome {
    bool monotone = true;
    bool reproducible = true;
    bool checked_repro = false;
    bool oracle_ok = true;
    bool checked_oracle = false;
    double excess = -std::numeric_limits<double>::infinity();
  };
  std::vector<Outcome> outcomes(jobs.size());
  constexpr std::size_t kReproStride = 5;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto inst = build_instance(jobs[j].S, jobs[j].params);
    const auto report = multi_start_solve(inst, opts);
    auto& out = outcomes[j];
    const auto& traj = report.objective_trajectory;
    for (std::size_t k = 1; k < traj.size(); ++k) {
      if (!(traj[k] <= traj[k - 1])) out.monotone = false;
    }
    if (j % kReproStride == 0) {
      out.checked_repro = true;
      out.reproducible = multi_start_solve(inst, opts) == report;
    }
    if (jobs[j].S.m() <= 6) {
      out.checked_oracle = true;
      const double pattern = oracles::enumerate_pattern_minimum(inst).value;
      out.excess = report.best_value - pattern;
      out.oracle_ok = report.best_value <= pattern + 1e-4;
    }
  }

  s.check("objective trajectories non-increasing", [&](std::ostringstream& os) {
    const auto ok = std::count_if(outcomes.begin(), outcomes.end(),
                                  [](const Outcome& o) { return o.monotone; });
    os << ok << "/" << outcomes.size() << " multi-start solves (50 starts, seed " << seed << ")";
    return static_cast<std::size_t>(ok) == outcomes.size();
  });
  s.check("reports bit-reproducible", [&](std::ostringstream& os) {
    std::size_t checked = 0;
    std::size_t ok = 0;
    for (const auto& o : outcomes) {
      checked += o.checked_repro;
      ok += o.checked_repro && o.reproducible;
    }
    os << ok << "/" << checked << " re-runs identical";
    return ok == checked;
  });
  s.check("best value <= pattern minimum + 1e-4 for m <= 6", [&](std::ostringstream& os) {
    std::size_t checked = 0;
    std::size_t ok = 0;
    double worst = -std::numeric_limits<double>::infinity();
    std::string worst_label;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      const auto& o = outcomes[j];
      if (!o.checked_oracle) continue;
      ++checked;
      ok += o.oracle_ok;
      if (std::isfinite(o.excess) && o.excess > worst) {
        worst = o.excess;
        worst_label = label_of(jobs[j].params);
      }
    }
    os << ok << "/" << checked << " solves, largest best - pattern " << fmt(worst) << " ("
       << worst_label << ")";
    return ok == checked;
  });
  s.check("ncp penalty_solve residual <= 1e-6 on >= 95% of the corpus",
          [&](std::ostringstream& os) {
            const auto& corpus = standard_corpus();
            std::size_t total = 0;
            std::size_t feasible = 0;
            double worst = 0.0;
            for (double tau : kTauGrid) {
              std::vector<double> residual(corpus.size());
              parallel_for(corpus.size(), [&](std::size_t i) {
                const auto inst = build_instance(corpus[i], ReductionParams::ncp(tau));
                const auto x0 = initial_point(inst, InitStrategy::PerturbedPattern, seed, 0);
                residual[i] = penalty_solve(inst, x0, opts).feasibility.equality_residual;
              });
              for (double r : residual) {
                ++total;
                feasible += r <= kFeasibilityTol;
                worst = std::max(worst, r);
              }
            }
            os << feasible << "/" << total << " single-start solves feasible, worst residual "
               << fmt(worst);
            return static_cast<double>(feasible) >= 0.95 * static_cast<double>(total);
          });
}

void suite_decide(Suite& s) {
  for (const auto& params : all_params()) {
    s.check("pattern decision vs brute force, " + label_of(params), [&](std::ostringstream& os) {
      const auto& corpus = standard_corpus();
      std::size_t agree = 0;
      for (const auto& S : corpus) {
        const auto truth = oracles::brute_force_partition(S);
        const auto d = decide_partition(S, params, DecideMethod::Pattern);
        const bool yes = d.answer == Answer::Yes;
        bool ok = yes == truth.has_value();
        if (ok && yes) {
          ok = d.certificate && d.certificate->balanced() &&
               d.certificate->assignment == truth->assignment;
        }
        agree += ok;
      }
      os << "agree " << agree << "/" << corpus.size();
      return agree == corpus.size();
    });
  }
}

}  // namespace

const std::vector<PartitionInstance>& standard_corpus() {
  static const std::vector<PartitionInstance> corpus = [] {
    std::vector<PartitionInstance> out;
    out.reserve(kCorpusSize);
    for (std::size_t i = 0; i < kCorpusSize; ++i) {
      const std::size_t m = 2 + i % 11;
      const bool want_yes = i % 2 == 0;
      Rng rng(kCorpusSeed, i);
      while (true) {
        std::vector<std::int64_t> a(m);
        for (auto& x : a) x = static_cast<std::int64_t>(rng.below(51));
        PartitionInstance S(std::move(a));
        if (is_yes(S) == want_yes) {
          out.push_back(std::move(S));
          break;
        }
      }
    }
    return out;
  }();
  return corpus;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "prop21", "thm-cp",  "thm-ncp", "thm-up", "thm-nup", "lemma23",
      "lemma33", "lemma37", "prop31",  "global", "solver",  "decide"};
  return names;
}

std::vector<CheckResult> run_suite(std::string_view name, std::uint64_t seed) {
  if (name == "all") {
    std::vector<CheckResult> out;
    for (const auto& n : suite_names()) {
      auto part = run_suite(n, seed);
      out.insert(out.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    }
    return out;
  }
  Suite s{std::string(name)};
  if (name == "prop21") {
    suite_prop21(s);
  } else if (name == "thm-cp") {
    suite_constrained(s, ProblemKind::CP);
  } else if (name == "thm-ncp") {
    suite_constrained(s, ProblemKind::NCP);
  } else if (name == "thm-up") {
    suite_unconstrained(s, ProblemKind::UP);
  } else if (name == "thm-nup") {
    suite_unconstrained(s, ProblemKind::NUP);
  } else if (name == "lemma23") {
    suite_lemma23(s, seed);
  } else if (name == "lemma33") {
    suite_lemma33(s);
  } else if (name == "lemma37") {
    suite_lemma37(s, seed);
  } else if (name == "prop31") {
    suite_prop31(s, seed);
  } else if (name == "global") {
    suite_global(s);
  } else if (name == "solver") {
    suite_solver(s, seed);
  } else if (name == "decide") {
    suite_decide(s);
  } else {
    throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
  }
  return s.take();
}

}  // namespace l12::verify
