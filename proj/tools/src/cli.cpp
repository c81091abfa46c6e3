#include "l12cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "l12/oracles.hpp"
#include "l12/reduction.hpp"
#include "l12/solvers.hpp"
#include "l12/verify.hpp"
#include "l12cli/instance_file.hpp"
#include "l12cli/run_record.hpp"

namespace l12::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kDefaultLog = "l12lab-runs.ndjson";

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

std::string vec(const Vector& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += num(x[i]);
  }
  return s + ")";
}

Json json_vec(const Vector& x) { return std::vector<double>(x.begin(), x.end()); }

// Non-finite doubles become null in JSON.
Json json_num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

void print_point(std::ostream& out, const ProblemInstance& inst, const Vector& x,
                 const std::string& label = "point") {
  if (inst.source()) {
    const auto [u, v] = split_uv(CandidatePoint(x), inst.m());
    out << label << " u = " << vec(u) << "\n" << std::string(label.size(), ' ') << " v = "
        << vec(v) << "\n";
  } else {
    out << label << " x = " << vec(x) << "\n";
  }
}

void emit_result(std::ostream& out, const Json& result) { out << "RESULT " << result.dump() << "\n"; }

std::string describe_certificate(const PartitionInstance& S, const PartitionCertificate& cert) {
  return cert.describe(S) + " (sums " + std::to_string(cert.sum1) + " = " +
         std::to_string(cert.sum2) + ")";
}

Json certificate_json(const PartitionInstance& S, const PartitionCertificate& cert) {
  Json j;
  j["subsets"] = cert.describe(S);
  j["assignment"] = std::vector<bool>(cert.assignment.begin(), cert.assignment.end());
  j["sum1"] = cert.sum1;
  j["sum2"] = cert.sum2;
  return j;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by several subcommands; presence is read from the Option
// handles.
struct Params {
  std::string set;
  std::string kind;
  double tau = 0.0;
  double lambda = 0.0;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;

  std::optional<double> tau_value() const {
    return tau_opt && tau_opt->count() ? std::optional(tau) : std::nullopt;
  }
  std::optional<double> lambda_value() const {
    return lambda_opt && lambda_opt->count() ? std::optional(lambda) : std::nullopt;
  }
  ReductionParams reduction() const {
    return ReductionParams{parse_problem_kind(kind), tau_value(), lambda_value()};
  }
};

void add_params(CLI::App* cmd, Params& p, bool with_set) {
  if (with_set) cmd->add_option("--set", p.set, "Multiset, comma-separated integers")->required();
  cmd->add_option("--kind", p.kind, "cp, ncp, up, nup or pqp")->required();
  p.tau_opt = cmd->add_option("--tau", p.tau, "tau (cp, ncp)");
  p.lambda_opt = cmd->add_option("--lambda", p.lambda, "lambda (up, nup)");
}

struct LogOption {
  std::string path;
  CLI::Option* opt = nullptr;

  void add(CLI::App* cmd) {
    opt = cmd->add_option("--log", path,
                          std::string("Append a run record (default file ") + kDefaultLog + ")")
              ->expected(0, 1);
  }
  bool enabled() const { return opt && opt->count() > 0; }
  std::string file() const { return path.empty() ? kDefaultLog : path; }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void maybe_log(const LogOption& log, const std::string& command, const std::string& digest,
               Json options, std::uint64_t seed, const Json& results, const Timer& timer) {
  if (!log.enabled()) return;
  RunRecord r;
  r.command = command;
  r.instance_digest = digest;
  r.options = std::move(options);
  r.seed = seed;
  r.results = results;
  r.wall_seconds = timer.seconds();
  append_run_record(log.file(), r);
}

void warn_range(std::ostream& err, const ProblemInstance& inst) {
  if (inst.parameter_out_of_range()) err << "warning: " << inst.range_warning() << "\n";
}

// --- gen ---------------------------------------------------------------------

int cmd_gen(const Params& p, const std::string& out_path, const LogOption& log, std::ostream& out,
            std::ostream& err) {
  const Timer timer;
  InstanceFile file;
  file.kind = parse_problem_kind(p.kind);
  if (file.kind == ProblemKind::GENERIC) {
    throw UsageError("gen builds reduction instances; write generic instances by hand");
  }
  file.multiset = PartitionInstance(parse_integer_list(p.set));
  file.tau = p.tau_value();
  file.lambda = p.lambda_value();
  const auto params = p.reduction();
  const auto inst = file.to_instance();
  warn_range(err, inst);
  const std::string text = serialize(file);
  write_text_file(out_path, text);
  const std::string digest = sha256_hex(text);

  const std::size_t m = file.multiset->m();
  const auto targets = closed_form_targets(m, params);
  out << "instance " << to_string(file.kind) << ", m = " << m << ", multiset " << p.set << "\n";
  out << "pattern magnitude c = " << num(targets.c) << "\n";
  out << "target value = " << num(targets.target_value) << "\n";
  if (targets.zero_point_value) out << "value at 0 = " << num(*targets.zero_point_value) << "\n";
  if (targets.escape_box) out << "escape box = " << num(*targets.escape_box) << "\n";
  out << "wrote " << out_path << " (sha256 " << digest << ")\n";

  Json result;
  result["command"] = "gen";
  result["kind"] = std::string(to_string(file.kind));
  result["m"] = m;
  result["c"] = targets.c;
  result["target_value"] = targets.target_value;
  if (targets.zero_point_value) result["zero_point_value"] = *targets.zero_point_value;
  if (targets.escape_box) result["escape_box"] = *targets.escape_box;
  result["path"] = out_path;
  result["digest"] = digest;
  emit_result(out, result);

  Json options;
  options["kind"] = p.kind;
  options["set"] = p.set;
  if (file.tau) options["tau"] = *file.tau;
  if (file.lambda) options["lambda"] = *file.lambda;
  Json logged = result;
  logged.erase("path");
  maybe_log(log, "gen", digest, options, 0, logged, timer);
  return kExitOk;
}

// --- solve -------------------------------------------------------------------

struct SolveArgs {
  std::string in;
  std::string method;
  int starts = 50;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string init;
  double step = 0.05;
  double box = 0.0;
  CLI::Option* box_opt = nullptr;
};

std::optional<ReductionParams> params_of(const ProblemInstance& inst) {
  if (!inst.source()) return std::nullopt;
  return ReductionParams{inst.kind(), inst.tau(), inst.lambda()};
}

int cmd_solve(const SolveArgs& a, const LogOption& log, std::ostream& out, std::ostream& err) {
  const Timer timer;
  const std::string text = read_text_file(a.in);
  const InstanceFile file = parse_instance(text);
  const ProblemInstance inst = file.to_instance();
  warn_range(err, inst);
  const std::string digest = sha256_hex(serialize(file));
  const bool least_squares = inst.form() == ObjectiveForm::LeastSquaresL1L2;
  const std::string method =
      a.method.empty() ? (least_squares ? "dca" : "penalty") : a.method;
  const auto params = params_of(inst);
  std::optional<double> target;
  if (params) target = closed_form_targets(inst.m(), *params).target_value;

  Json options;
  options["method"] = method;
  Json result;
  result["command"] = "solve";
  result["method"] = method;
  result["kind"] = std::string(to_string(inst.kind()));

  out << "instance " << to_string(inst.kind()) << " (" << inst.rows() << " x " << inst.cols()
      << ")";
  if (params) out << ", m = " << inst.m();
  out << "\nmethod " << method << "\n";

  double value = 0.0;
  if (method == "dca" || method == "penalty") {
    if (method == "dca" && !least_squares) {
      throw UsageError("dca needs a least-squares kind (up, nup, generic with lambda)");
    }
    if (method == "penalty" && least_squares) {
      throw UsageError("penalty needs a constrained kind (cp, ncp, pqp, generic with tau)");
    }
    SolverOptions opts;
    opts.n_starts = a.starts;
    opts.seed = a.seed;
    opts.stop_tol = a.tol;
    opts.init_strategy =
        a.init.empty() ? (params ? InitStrategy::PerturbedPattern : InitStrategy::RandomBox)
                       : parse_init_strategy(a.init);
    opts.validate();
    const auto r = multi_start_solve(inst, opts);
    value = r.best_value;
    out << a.starts << " starts (" << to_string(opts.init_strategy) << "), seed " << a.seed
        << ", best start " << r.best_start << "\n";
    out << "best value = " << num(r.best_value) << "\n";
    print_point(out, inst, r.best_point.x());
    out << "equality residual = " << num(r.feasibility.equality_residual)
        << ", nonneg violation = " << num(r.feasibility.nonneg_violation) << "\n";
    out << "criticality residual = " << num(r.criticality_residual) << "\n";
    out << "converged = " << (r.converged ? "yes" : "no")
        << ", outer iterations = " << r.outer_iterations << "\n";
    options["starts"] = a.starts;
    options["tol"] = a.tol;
    options["init"] = std::string(to_string(opts.init_strategy));
    result["best_value"] = json_num(r.best_value);
    result["point"] = json_vec(r.best_point.x());
    result["equality_residual"] = r.feasibility.equality_residual;
    result["nonneg_violation"] = r.feasibility.nonneg_violation;
    result["criticality_residual"] = r.criticality_residual;
    result["converged"] = r.converged;
    result["outer_iterations"] = r.outer_iterations;
    result["best_start"] = r.best_start;
    Json per_start = Json::array();
    for (double v : r.per_start_values) per_start.push_back(json_num(v));
    result["per_start_values"] = std::move(per_start);
  } else if (method == "pattern") {
    if (!params) throw UsageError("pattern enumeration needs a reduction instance (multiset)");
    const auto pm = oracles::enumerate_pattern_minimum(inst);
    value = pm.value;
    out << "pattern minimum = " << num(pm.value) << ", " << pm.argmins.size() << " argmins\n";
    Json argmins = Json::array();
    for (std::size_t i = 0; i < pm.argmins.size(); ++i) {
      if (i < 8) print_point(out, inst, pm.argmins[i].x(), "argmin " + std::to_string(i + 1));
      argmins.push_back(json_vec(pm.argmins[i].x()));
    }
    if (pm.argmins.size() > 8) out << "(" << pm.argmins.size() - 8 << " more argmins)\n";
    result["best_value"] = json_num(pm.value);
    result["argmin_count"] = pm.argmins.size();
    result["argmins"] = std::move(argmins);
  } else if (method == "grid") {
    if (!least_squares) {
      throw UsageError("grid search needs a least-squares kind (no equality constraints)");
    }
    double box = a.box;
    if (!(a.box_opt && a.box_opt->count())) {
      if (!params) throw UsageError("grid search on a generic instance needs --box");
      box = *closed_form_targets(inst.m(), *params).escape_box;
    }
    auto spec = oracles::GridSpec::cube(inst.cols(), inst.nonneg() ? 0.0 : -box, box, a.step);
    const oracles::ScalarField f = [&inst](const Vector& x) {
      return eval_objective(inst, CandidatePoint(x));
    };
    const auto g = oracles::grid_minimize(f, spec);
    value = g.value;
    out << "grid " << spec.total_points() << " points, box " << num(box) << ", step "
        << num(a.step) << "\n";
    out << "grid minimum = " << num(g.value) << "\n";
    print_point(out, inst, g.point);
    options["step"] = a.step;
    options["box"] = box;
    result["best_value"] = g.value;
    result["point"] = json_vec(g.point);
    result["grid_points"] = spec.total_points();
  } else {
    throw UsageError("unknown method '" + method + "' (dca, penalty, pattern, grid)");
  }
  if (target) {
    out << "target = " << num(*target) << ", gap = " << num(value - *target) << "\n";
    result["target_value"] = *target;
    result["gap"] = json_num(value - *target);
  }
  emit_result(out, result);
  maybe_log(log, "solve", digest, options, a.seed, result, timer);
  return kExitOk;
}

// --- decide ------------------------------------------------------------------

struct DecideArgs {
  std::string method = "pattern";
  double tol = 1e-6;
  int starts = 50;
  std::uint64_t seed = 0;
};

int cmd_decide(const Params& p, const DecideArgs& a, const LogOption& log, std::ostream& out,
               std::ostream& err) {
  const Timer timer;
  const PartitionInstance S(parse_integer_list(p.set));
  const auto params = p.reduction();
  if (params.kind == ProblemKind::GENERIC) throw UsageError("decide needs a reduction kind");
  const auto method = parse_decide_method(a.method);
  InstanceFile file;
  file.kind = params.kind;
  file.multiset = S;
  file.tau = params.tau;
  file.lambda = params.lambda;
  const auto inst = file.to_instance();
  warn_range(err, inst);
  DecideOptions options;
  options.solver.n_starts = a.starts;
  options.solver.seed = a.seed;
  const auto d = decide_partition(S, params, method, a.tol, options);

  out << "answer " << to_string(d.answer) << "\n";
  if (d.certificate) {
    out << "certificate " << describe_certificate(S, *d.certificate) << "\n";
  } else if (method == DecideMethod::Solver && d.answer == Answer::No) {
    out << "no certificate found (a solver NO is not a proof)\n";
  }
  out << "achieved = " << num(d.achieved_value) << ", target = " << num(d.target_value)
      << ", gap = " << num(d.gap) << "\n";

  Json result;
  result["command"] = "decide";
  result["answer"] = std::string(to_string(d.answer));
  result["kind"] = std::string(to_string(params.kind));
  result["method"] = a.method;
  result["certificate"] = d.certificate ? certificate_json(S, *d.certificate) : Json(nullptr);
  result["achieved_value"] = json_num(d.achieved_value);
  result["target_value"] = d.target_value;
  result["gap"] = json_num(d.gap);
  emit_result(out, result);

  Json opts;
  opts["method"] = a.method;
  opts["tol"] = a.tol;
  if (method == DecideMethod::Solver) opts["starts"] = a.starts;
  maybe_log(log, "decide", sha256_hex(serialize(file)), opts, a.seed, result, timer);
  return d.answer == Answer::Yes ? kExitOk : kExitNo;
}

// --- oracle ------------------------------------------------------------------

struct OracleArgs {
  std::string set;
  double tau = 1.0;
  double lambda = 1.0;
  std::size_t m = 1;
  Eigen::Index k = 1;
  double step = 0.0;
  double box = 2.0;
  std::size_t starts = 100;
  std::uint64_t seed = 1;
};

int oracle_partition(const OracleArgs& a, std::ostream& out) {
  const PartitionInstance S(parse_integer_list(a.set));
  const auto cert = oracles::brute_force_partition(S);
  Json result;
  result["command"] = "oracle partition";
  if (cert) {
    out << "certificate " << describe_certificate(S, *cert) << "\n";
    result["certificate"] = certificate_json(S, *cert);
  } else {
    out << "no balanced partition (total " << S.total() << ")\n";
    result["certificate"] = nullptr;
  }
  emit_result(out, result);
  return kExitOk;
}

int oracle_grid(const OracleArgs& a, std::ostream& out) {
  if (a.m == 0) throw UsageError("--m must be >= 1");
  const double step = a.step > 0.0 ? a.step : (a.m == 1 ? 0.002 : 0.02);
  const double lambda = a.lambda;
  const oracles::ScalarField g = [lambda](const Vector& x) {
    return oracles::eval_up_lower_bound(x, lambda);
  };
  auto spec = oracles::GridSpec::cube(2 * static_cast<Eigen::Index>(a.m), -a.box, a.box, step);
  spec.max_points = 2'000'000'000;
  const auto r = oracles::grid_minimize(g, spec);
  const double target = lower_bound_optimum(a.m, lambda);
  const double c = pattern_magnitude(a.m, lambda);
  out << "grid " << spec.total_points() << " points on [" << num(-a.box) << ", " << num(a.box)
      << "]^" << 2 * a.m << ", step " << num(step) << "\n";
  out << "minimum of the lower bound g(u,v) = " << num(r.value) << ", g* = " << num(target)
      << ", difference " << num(r.value - target) << "\n";
  const auto m = static_cast<Eigen::Index>(a.m);
  out << "argmin u = " << vec(r.point.head(m)) << ", v = " << vec(r.point.tail(m))
      << ", pattern magnitude c = " << num(c) << "\n";
  Json result;
  result["command"] = "oracle grid";
  result["value"] = r.value;
  result["point"] = json_vec(r.point);
  result["target_value"] = target;
  result["c"] = c;
  result["grid_points"] = spec.total_points();
  emit_result(out, result);
  return kExitOk;
}

int oracle_gw(const OracleArgs& a, std::ostream& out) {
  if (a.m == 0 || a.k < 1) throw UsageError("--m and --k must be >= 1");
  const double step = a.step > 0.0 ? a.step : (a.k == 1 ? 1e-3 : 1e-2);
  const auto spec = oracles::GridSpec::cube(a.k, -3.0, 3.0, step);
  const auto r = oracles::check_gw_unique_minimizer(a.tau, a.m, spec, a.starts, a.seed);
  out << "grid on [-3, 3]^" << a.k << ", step " << num(step) << ": argmin " << vec(r.point)
      << ", g = " << num(r.objective) << ", |grad| = " << num(r.gradient_norm) << "\n";
  out << r.starts << " gradient descents: max final |w| = " << num(r.max_final_norm) << "\n";
  out << "unique minimizer at origin: " << (r.converged_to_origin ? "PASS" : "FAIL") << "\n";
  Json result;
  result["command"] = "oracle gw";
  result["pass"] = r.converged_to_origin;
  result["grid_min_at_origin"] = r.grid_min_at_origin;
  result["descents_at_origin"] = r.descents_at_origin;
  result["max_final_norm"] = r.max_final_norm;
  result["grid_point"] = json_vec(r.point);
  result["grid_value"] = r.objective;
  emit_result(out, result);
  return r.converged_to_origin ? kExitOk : kExitNo;
}

int oracle_kkt(const OracleArgs& a, std::ostream& out) {
  if (a.m == 0) throw UsageError("--m must be >= 1");
  const double c = pattern_magnitude(a.m, a.lambda);
  const Vector t = Vector::Constant(static_cast<Eigen::Index>(a.m), c);
  const double residual = oracles::kkt_residual_nup(t, a.lambda);
  const double h = oracles::eval_h_t(t, a.lambda);
  const double target = lower_bound_optimum(a.m, a.lambda);
  out << "residual " << num(residual) << " at t = " << num(c) << " * 1_" << a.m << "\n";
  out << "h(t) = " << num(h) << ", g* = " << num(target) << "\n";
  Json result;
  result["command"] = "oracle kkt";
  result["c"] = c;
  result["residual"] = residual;
  result["h"] = h;
  result["target_value"] = target;
  emit_result(out, result);
  return kExitOk;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(const std::string& suite, std::uint64_t seed, const LogOption& log,
               std::ostream& out) {
  const Timer timer;
  if (suite != "all") {
    const auto& names = verify::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
      throw UsageError("unknown suite '" + suite + "'");
    }
  }
  const auto checks = verify::run_suite(suite, seed);
  std::size_t passed = 0;
  Json summary = Json::array();
  for (const auto& c : checks) {
    passed += c.passed;
    out << (c.passed ? "PASS " : "FAIL ") << c.suite << ": " << c.name << " (" << c.detail
        << ") [" << num(c.seconds) << " s]\n";
    Json j;
    j["suite"] = c.suite;
    j["check"] = c.name;
    j["pass"] = c.passed;
    j["detail"] = c.detail;
    out << "CHECK " << j.dump() << "\n";
    summary.push_back(std::move(j));
  }
  out << passed << "/" << checks.size() << " checks passed\n";
  Json result;
  result["command"] = "verify";
  result["suite"] = suite;
  result["passed"] = passed;
  result["total"] = checks.size();
  emit_result(out, result);
  Json opts;
  opts["suite"] = suite;
  Json logged = result;
  logged["checks"] = std::move(summary);
  maybe_log(log, "verify", "", opts, seed, logged, timer);
  return passed == checks.size() ? kExitOk : kExitNo;
}

}  // namespace

std::vector<std::int64_t> parse_integer_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  bool any = false;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string token = text.substr(pos, comma - pos);
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    token = first == std::string::npos ? "" : token.substr(first, last - first + 1);
    if (token.empty()) {
      if (text.find_first_not_of(" \t") == std::string::npos) break;
      throw std::invalid_argument("empty element in integer list '" + text + "'");
    }
    std::int64_t value = 0;
    const char* begin = token.data() + (token[0] == '+' ? 1 : 0);
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw std::invalid_argument("'" + token + "' is not an integer");
    }
    out.push_back(value);
    any = true;
    pos = comma + 1;
  }
  if (!any) throw std::invalid_argument("empty multiset");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse L1-L2 reconstruction, partition reductions and verification oracles",
               "l12lab"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Params gen_params;
  std::string gen_out = "instance.json";
  LogOption gen_log;
  auto* gen = app.add_subcommand("gen", "Build a reduction instance file from a multiset");
  add_params(gen, gen_params, true);
  gen->add_option("--out", gen_out, "Output path")->capture_default_str();
  gen_log.add(gen);

  SolveArgs solve_args;
  LogOption solve_log;
  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("--in", solve_args.in, "Instance file")->required();
  solve->add_option("--method", solve_args.method, "dca, penalty, pattern or grid");
  solve->add_option("--starts", solve_args.starts, "Number of starts")->capture_default_str();
  solve->add_option("--seed", solve_args.seed, "Random seed")->capture_default_str();
  solve->add_option("--tol", solve_args.tol, "DCA stopping tolerance")->capture_default_str();
  solve->add_option("--init", solve_args.init, "zero, random_box or perturbed_pattern");
  solve->add_option("--step", solve_args.step, "Grid step")->capture_default_str();
  solve_args.box_opt = solve->add_option("--box", solve_args.box, "Grid half-width");
  solve_log.add(solve);

  Params decide_params;
  DecideArgs decide_args;
  LogOption decide_log;
  auto* decide = app.add_subcommand("decide", "Decide a partition instance (exit 0 YES, 1 NO)");
  add_params(decide, decide_params, true);
  decide->add_option("--method", decide_args.method, "pattern or solver")->capture_default_str();
  decide->add_option("--tol", decide_args.tol, "Decision tolerance")->capture_default_str();
  decide->add_option("--starts", decide_args.starts, "Solver starts")->capture_default_str();
  decide->add_option("--seed", decide_args.seed, "Solver seed")->capture_default_str();
  decide_log.add(decide);

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exact and brute-force oracles");
  oracle->require_subcommand(1);
  auto* o_partition = oracle->add_subcommand("partition", "Brute-force balanced partition");
  o_partition->add_option("--set", oracle_args.set, "Multiset")->required();
  auto* o_grid = oracle->add_subcommand("grid", "Grid minimum of the UP lower bound g(u,v)");
  o_grid->add_option("--lambda", oracle_args.lambda)->required();
  o_grid->add_option("--m", oracle_args.m)->required();
  o_grid->add_option("--step", oracle_args.step, "Grid step (default 0.002 for m=1, else 0.02)");
  o_grid->add_option("--box", oracle_args.box, "Half-width")->capture_default_str();
  auto* o_gw = oracle->add_subcommand("gw", "Unique minimizer of g(w) at the origin");
  o_gw->add_option("--tau", oracle_args.tau)->required();
  o_gw->add_option("--m", oracle_args.m)->required();
  o_gw->add_option("--k", oracle_args.k, "Dimension of w")->capture_default_str();
  o_gw->add_option("--step", oracle_args.step, "Grid step (default 1e-3 for k=1, else 1e-2)");
  o_gw->add_option("--starts", oracle_args.starts, "Descents")->capture_default_str();
  o_gw->add_option("--seed", oracle_args.seed)->capture_default_str();
  auto* o_kkt = oracle->add_subcommand("kkt", "KKT residual of h(t) at c(lambda) 1_m");
  o_kkt->add_option("--lambda", oracle_args.lambda)->required();
  o_kkt->add_option("--m", oracle_args.m)->required();

  std::string suite = "all";
  std::uint64_t verify_seed = 1;
  LogOption verify_log;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites (exit 0 iff all pass)");
  verify_cmd->add_option("--suite", suite, "Suite name or all")->capture_default_str();
  verify_cmd->add_option("--seed", verify_seed)->capture_default_str();
  verify_log.add(verify_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_params, gen_out, gen_log, out, err);
    if (solve->parsed()) return cmd_solve(solve_args, solve_log, out, err);
    if (decide->parsed()) return cmd_decide(decide_params, decide_args, decide_log, out, err);
    if (o_partition->parsed()) return oracle_partition(oracle_args, out);
    if (o_grid->parsed()) return oracle_grid(oracle_args, out);
    if (o_gw->parsed()) return oracle_gw(oracle_args, out);
    if (o_kkt->parsed()) return oracle_kkt(oracle_args, out);
    if (verify_cmd->parsed()) return cmd_verify(suite, verify_seed, verify_log, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  err << "error: no command\n";
  return kExitError;
}

}  // namespace l12::cli
