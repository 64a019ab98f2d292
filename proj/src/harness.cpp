#include "fivegcs/harness.hpp"

#include "fivegcs/data_io.hpp"
#include "fivegcs/synthetic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace fivegcs {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------------- config

void ExperimentConfig::check() const {
  if (data.empty() == synthetic.empty()) throw ConfigError("exactly one of --data and --synthetic is required");
  if (clients < 1) throw ConfigError("--clients must be at least 1");
  if (cohort < 1 || cohort > clients) throw ConfigError("--cohort must lie in [1, clients]");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("--eps must lie in (0, 1]");
  if (max_rounds < 1) throw ConfigError("max rounds must be at least 1");
  if (seeds < 1) throw ConfigError("seeds must be at least 1");
  if (!(kappa > 1.0)) throw ConfigError("kappa must exceed 1");
  if (init_u != "grad" && init_u != "zero") throw ConfigError("--init-u must be grad or zero");
  static const char* modes[] = {"run", "sweep-k", "sweep-c", "contract-test"};
  if (std::find(std::begin(modes), std::end(modes), mode) == std::end(modes)) {
    throw ConfigError("unknown --mode '" + mode + "'");
  }
  static const char* methods[] = {"5gcs", "5gcs0", "5gcsinf", "gd", "localgd", "scaffold", "proxskip"};
  if (std::find(std::begin(methods), std::end(methods), method) == std::end(methods)) {
    throw ConfigError("unknown --method '" + method + "'");
  }
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  static const char* known[] = {"data",  "synthetic",   "clients",   "cohort",      "method", "schedule",
                                "local-solver", "local-steps", "batch",  "conservative", "init-u", "eps",
                                "seed",  "max-rounds",  "kappa",     "out",         "mode",   "wall-time",
                                "parallel", "k-list",   "c-list",    "seeds",       "contract-rounds"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  try {
    read_field(j, "data", c.data);
    read_field(j, "synthetic", c.synthetic);
    read_field(j, "clients", c.clients);
    read_field(j, "cohort", c.cohort);
    read_field(j, "method", c.method);
    read_field(j, "schedule", c.schedule);
    read_field(j, "local-solver", c.local_solver);
    if (j.contains("local-steps")) c.local_steps = j.at("local-steps").get<std::size_t>();
    read_field(j, "batch", c.batch);
    read_field(j, "conservative", c.conservative);
    read_field(j, "init-u", c.init_u);
    read_field(j, "eps", c.eps);
    read_field(j, "seed", c.seed);
    read_field(j, "max-rounds", c.max_rounds);
    read_field(j, "kappa", c.kappa);
    read_field(j, "out", c.out);
    read_field(j, "mode", c.mode);
    read_field(j, "wall-time", c.wall_time);
    read_field(j, "parallel", c.parallel);
    read_field(j, "k-list", c.k_list);
    read_field(j, "c-list", c.c_list);
    read_field(j, "seeds", c.seeds);
    read_field(j, "contract-rounds", c.contract_rounds);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"data", c.data},
            {"synthetic", c.synthetic},
            {"clients", c.clients},
            {"cohort", c.cohort},
            {"method", c.method},
            {"schedule", c.schedule},
            {"local-solver", c.local_solver},
            {"batch", c.batch},
            {"conservative", c.conservative},
            {"init-u", c.init_u},
            {"eps", c.eps},
            {"seed", c.seed},
            {"max-rounds", c.max_rounds},
            {"kappa", c.kappa},
            {"out", c.out},
            {"mode", c.mode},
            {"wall-time", c.wall_time},
            {"parallel", c.parallel},
            {"k-list", c.k_list},
            {"c-list", c.c_list},
            {"seeds", c.seeds},
            {"contract-rounds", c.contract_rounds}};
  if (c.local_steps) j["local-steps"] = *c.local_steps;
  return j;
}

// ------------------------------------------------------------------ problem

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (const unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ProblemInstance build_problem(const ExperimentConfig& config) {
  if (!config.synthetic.empty()) {
    const auto spec = parse_synthetic(config.synthetic);
    const std::string desc = spec.canonical() + ";M=" + std::to_string(config.clients);
    return ProblemInstance{make_synthetic_problem(spec, config.clients), fnv1a(desc), desc};
  }
  std::ifstream in(config.data, std::ios::binary);
  if (!in) throw ConfigError("cannot open data file '" + config.data + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  std::istringstream text(bytes);
  const auto parsed = parse_libsvm(text);
  std::ostringstream kappa;
  kappa << std::setprecision(17) << config.kappa;
  const std::string desc = "libsvm:" + config.data + ";M=" + std::to_string(config.clients) + ";kappa=" + kappa.str();
  const auto key = fnv1a(";M=" + std::to_string(config.clients), fnv1a(bytes));
  return ProblemInstance{logistic_with_condition(partition(parsed.points, parsed.dimension, config.clients), config.kappa),
                         key, desc};
}

// ---------------------------------------------------------------- reference

ReferenceSolution compute_reference(const Problem& problem, double tol) {
  const auto d = problem.dimension();
  Vector x = Vector::Zero(d);
  Vector g = problem.grad_f(x);
  const double threshold = tol * std::max(1.0, g.norm());
  const double M = static_cast<double>(problem.clients());

  if (d <= 2000) {
    for (int it = 0; it < 500 && g.norm() > threshold; ++it) {
      Matrix h = problem.lambda() * Matrix::Identity(d, d);
      for (std::size_t m = 0; m < problem.clients(); ++m) h += problem.loss(m).hessian(x) / M;
      const Vector step = h.llt().solve(-g);
      const double f0 = problem.f(x);
      const double slope = g.dot(step);
      const double gnorm = g.norm();
      double t = 1.0;
      Vector trial = x + step;
      while (t > 1e-12) {
        trial = x + t * step;
        if (problem.f(trial) <= f0 + 1e-4 * t * slope) break;
        if (problem.grad_f(trial).norm() <= 0.5 * gnorm) break;
        t *= 0.5;
      }
      if (t <= 1e-12) break;
      x = trial;
      g = problem.grad_f(x);
    }
  } else {
    const double step = 1.0 / problem.L();
    for (long it = 0; it < 1000000 && g.norm() > threshold; ++it) {
      x -= step * g;
      g = problem.grad_f(x);
    }
  }
  if (g.norm() > threshold) {
    throw ConvergenceError("compute_reference: |grad f| = " + std::to_string(g.norm()) + " above " +
                           std::to_string(threshold));
  }
  ReferenceSolution ref;
  ref.x_star = x;
  for (std::size_t m = 0; m < problem.clients(); ++m) ref.u_star.push_back(problem.grad_F_m(m, x));
  ref.f_star = problem.f(x);
  return ref;
}

ReferenceSolution compute_reference_cached(const Problem& problem, std::uint64_t key, const std::string& cache_dir,
                                           double tol) {
  std::ostringstream name;
  name << "reference-" << std::hex << std::setw(16) << std::setfill('0') << key << '-' << std::setw(16)
       << std::bit_cast<std::uint64_t>(problem.lambda()) << ".json";
  const fs::path path = fs::path(cache_dir) / name.str();
  if (fs::exists(path)) {
    std::ifstream in(path);
    const json j = json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("x_star") &&
        j.at("x_star").size() == static_cast<std::size_t>(problem.dimension())) {
      ReferenceSolution ref;
      const auto xs = j.at("x_star").get<std::vector<double>>();
      ref.x_star = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
      for (std::size_t m = 0; m < problem.clients(); ++m) ref.u_star.push_back(problem.grad_F_m(m, ref.x_star));
      ref.f_star = problem.f(ref.x_star);
      return ref;
    }
  }
  ReferenceSolution ref = compute_reference(problem, tol);
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << json{{"x_star", std::vector<double>(ref.x_star.data(), ref.x_star.data() + ref.x_star.size())},
              {"f_star", ref.f_star},
              {"lambda", problem.lambda()}}
             .dump();
  return ref;
}

// ------------------------------------------------------------------ methods

MethodPlan plan_method(const ExperimentConfig& config, const Problem& problem) {
  MethodPlan plan;
  plan.init = config.init_u == "zero" ? InitU::zero : InitU::gradient;
  const std::string& method = config.method;
  if (method == "gd" || method == "localgd" || method == "scaffold" || method == "proxskip") {
    plan.is_5gcs = false;
    plan.baseline = default_baseline(problem, parse_baseline(method), config.cohort);
    if (config.local_steps && (method == "localgd" || method == "scaffold")) {
      if (*config.local_steps < 1) throw ConfigError("--local-steps must be at least 1 for " + method);
      plan.baseline.local_steps = *config.local_steps;
      plan.baseline.stepsize = 1.0 / (6.0 * problem.L() * static_cast<double>(*config.local_steps));
    }
    return plan;
  }

  std::string schedule = config.schedule;
  if (schedule.empty()) schedule = method == "5gcs0" ? "thm3" : method == "5gcsinf" ? "thm1" : "thm2";
  plan.schedule = make_schedule(schedule, problem, config.cohort);
  validate(plan.schedule, problem);
  plan.options.execution = config.parallel ? Execution::parallel : Execution::serial;
  plan.options.solver.gd_policy = config.conservative ? GdStepPolicy::conservative : GdStepPolicy::per_client;
  plan.options.solver.batch = config.batch;
  const bool has_tau = plan.schedule.variant != Variant::thm3;

  if (method == "5gcs0") {
    plan.options.update = DualUpdate::gradient_at_hat;
    plan.schedule.local_steps = 0;
    return plan;
  }
  if (method == "5gcsinf") {
    if (!has_tau) throw ConfigError("5gcsinf needs a schedule with a dual stepsize tau (not thm3)");
    plan.options.update = DualUpdate::point_saga;
    plan.options.solver.kind = SolverKind::exact_prox;
    return plan;
  }

  plan.options.update = DualUpdate::local_solver;
  std::string solver = config.local_solver;
  if (solver.empty()) solver = plan.schedule.variant == Variant::thm1 ? "prox" : "gd";
  plan.options.solver.kind = parse_solver_kind(solver);
  if (plan.options.solver.kind == SolverKind::exact_prox) {
    if (!has_tau) throw ConfigError("the prox local solver needs a schedule with tau (not thm3)");
    return plan;
  }
  if (plan.schedule.variant == Variant::thm1 && !config.local_steps) {
    throw ConfigError("thm1 assumes an exact prox; pass --local-steps to run it with " + solver);
  }
  const std::size_t k = config.local_steps.value_or(plan.schedule.local_steps);
  if (!has_tau && k > 0) throw ConfigError("thm3 has no tau; it only admits zero local steps");
  plan.schedule.local_steps = k;
  plan.options.solver.local_steps = k;
  return plan;
}

namespace {

RunControl control_for(const ExperimentConfig& config) {
  RunControl control;
  control.eps = config.eps;
  control.max_rounds = config.max_rounds;
  control.wall_time = config.wall_time;
  return control;
}

json optional_rounds(const std::optional<std::size_t>& t) { return t ? json(*t) : json(nullptr); }

ExperimentResult run_plan(const Problem& problem, const ReferenceSolution& ref, const ExperimentConfig& config,
                          const MethodPlan& plan) {
  const RunControl control = control_for(config);
  ExperimentResult result;
  json& s = result.summary;
  s["method"] = config.method;
  s["seed"] = config.seed;
  s["clients"] = problem.clients();
  s["dimension"] = problem.dimension();
  s["L"] = problem.L();
  s["mu"] = problem.mu();
  s["L_F"] = problem.L_F();
  s["kappa"] = problem.kappa();
  s["eps"] = config.eps;
  if (plan.is_5gcs) {
    result.run = run_5gcs(problem, ref, plan.schedule, plan.options, control, config.seed, plan.init);
    const bool exact = plan.options.update == DualUpdate::point_saga ||
                       (plan.options.update == DualUpdate::local_solver &&
                        plan.options.solver.kind == SolverKind::exact_prox);
    s["cohort"] = plan.schedule.cohort;
    s["schedule"] = to_string(plan.schedule.variant);
    if (plan.schedule.variant == Variant::thm6) s["alpha"] = plan.schedule.alpha;
    s["gamma"] = plan.schedule.gamma;
    s["tau"] = plan.schedule.variant == Variant::thm3 ? json(nullptr) : json(plan.schedule.tau);
    s["K"] = exact ? json("inf") : json(plan.schedule.local_steps);
    s["local_solver"] = plan.options.update == DualUpdate::local_solver ? to_string(plan.options.solver.kind)
                        : exact                                        ? "prox"
                                                                       : "none";
    s["rho"] = contraction_rate(plan.schedule, problem);
    s["T_bound"] = rounds_bound(plan.schedule, problem, config.eps);
    s["criterion"] = "psi";
  } else {
    result.run = run_baseline(problem, ref, plan.baseline, control, config.seed,
                              config.parallel ? Execution::parallel : Execution::serial);
    s["cohort"] = plan.baseline.cohort;
    s["stepsize"] = plan.baseline.stepsize;
    s["K"] = plan.baseline.local_steps;
    if (plan.baseline.method == BaselineMethod::proxskip) s["p"] = plan.baseline.probability;
    s["gamma"] = nullptr;
    s["tau"] = nullptr;
    s["rho"] = nullptr;
    s["T_bound"] = nullptr;
    s["criterion"] = "dist_sq";
  }
  const auto& trace = result.run.trace;
  s["T"] = optional_rounds(result.run.rounds_to_eps);
  s["rounds_run"] = trace.back().round;
  s["psi0"] = trace.front().psi;
  s["psi_final"] = trace.back().psi;
  s["dist_sq_final"] = trace.back().dist_sq;
  s["uploads"] = trace.back().uploads;
  return result;
}

}  // namespace

ExperimentResult run_method(const Problem& problem, const ReferenceSolution& ref, const ExperimentConfig& config) {
  return run_plan(problem, ref, config, plan_method(config, problem));
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "round,psi,dist_sq,subopt,uploads,ms\n";
  out << std::setprecision(17);
  for (const auto& r : trace) {
    out << r.round << ',' << r.psi << ',' << r.dist_sq << ',' << r.subopt << ',' << r.uploads << ','
        << std::setprecision(6) << r.ms << std::setprecision(17) << '\n';
  }
}

// ------------------------------------------------------------------- sweeps

std::vector<std::size_t> default_k_list(const Problem& problem, std::size_t cohort) {
  const std::size_t k_min = thm6_min_steps(problem);
  const std::size_t k_star = required_K_gd(problem, cohort);
  std::vector<std::size_t> ks = {k_min, (k_min + k_star) / 2, k_star, 2 * k_star, 5 * k_star, 10 * k_star, 200};
  if (k_min > 1) ks.insert(ks.begin() + 1, k_min + (k_star > k_min ? (k_star - k_min) / 4 : 0));
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

std::vector<SweepPoint> sweep_T_vs_K(const Problem& problem, const ReferenceSolution& ref,
                                     const ExperimentConfig& config, const std::vector<std::size_t>& ks) {
  ExperimentConfig base = config;
  base.method = "5gcs";
  base.schedule = "thm2";
  base.local_solver = "gd";
  base.local_steps.reset();
  const MethodPlan thm2 = plan_method(base, problem);
  const double log4k = std::log(4.0 * problem.kappa());
  const double alpha_max = thm6_alpha_max(problem, config.cohort);

  std::vector<SweepPoint> points;
  for (const auto k : ks) {
    const double alpha = static_cast<double>(k) / (2.0 * log4k);
    MethodPlan plan = thm2;
    std::string note;
    if (!(alpha > 1.0)) {
      for (std::size_t s = 0; s < config.seeds; ++s) {
        points.push_back({k, alpha, config.seed + s, std::nullopt, "rejected: alpha <= 1"});
      }
      continue;
    }
    if (alpha < alpha_max) {
      plan.schedule = schedule_thm6(problem, config.cohort, alpha);
      note = "thm6";
    } else {
      note = "thm2 stepsizes (alpha >= alpha_max)";
    }
    plan.schedule.local_steps = k;
    plan.options.solver.local_steps = k;
    for (std::size_t s = 0; s < config.seeds; ++s) {
      ExperimentConfig run = base;
      run.seed = config.seed + s;
      run.wall_time = false;
      const auto result = run_plan(problem, ref, run, plan);
      points.push_back({k, alpha, run.seed, result.run.rounds_to_eps, note});
    }
  }
  return points;
}

std::vector<SweepPoint> sweep_T_vs_C(const Problem& problem, const ReferenceSolution& ref,
                                     const ExperimentConfig& config, const std::vector<std::size_t>& cs) {
  std::vector<SweepPoint> points;
  for (const auto c : cs) {
    for (std::size_t s = 0; s < config.seeds; ++s) {
      ExperimentConfig run = config;
      run.cohort = c;
      run.seed = config.seed + s;
      run.wall_time = false;
      const auto result = run_method(problem, ref, run);
      points.push_back({c, 0.0, run.seed, result.run.rounds_to_eps, ""});
    }
  }
  return points;
}

std::optional<double> median_rounds(const std::vector<SweepPoint>& points, std::size_t value) {
  std::vector<double> ts;
  for (const auto& p : points) {
    if (p.value != value) continue;
    ts.push_back(p.rounds ? static_cast<double>(*p.rounds) : std::numeric_limits<double>::infinity());
  }
  if (ts.empty()) return std::nullopt;
  std::sort(ts.begin(), ts.end());
  const auto n = ts.size();
  return n % 2 == 1 ? ts[n / 2] : 0.5 * (ts[n / 2 - 1] + ts[n / 2]);
}

// -------------------------------------------------------------- contraction

bool ContractionReport::all_hold() const {
  return std::all_of(rows.begin(), rows.end(), [](const ContractionRow& r) { return r.holds; });
}

ContractionReport contraction_test(const Problem& problem, const ReferenceSolution& ref, const Schedule& schedule,
                                   const RoundOptions& options, std::size_t rounds, std::uint64_t seed, double slack) {
  ContractionReport report;
  report.rho = contraction_rate(schedule, problem);
  if (!(report.rho < 1.0)) throw ConfigError("contraction rate must be below 1");
  ServerState state = initial_state(problem);
  for (std::size_t t = 0; t < rounds; ++t) {
    const double psi = lyapunov(state, ref, schedule, problem);
    const double expected = expected_next_lyapunov(problem, state, ref, schedule, options);
    const double bound = (1.0 - report.rho) * psi;
    report.rows.push_back({t, psi, expected, bound, expected <= bound + slack * psi});
    state = advance(problem, state, draw_cohort(problem.clients(), schedule.cohort, seed, state.round), schedule,
                    options, seed);
  }
  return report;
}

// ---------------------------------------------------------------- top level

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

json sweep_summary(const std::vector<SweepPoint>& points, const char* key) {
  json rows = json::array();
  std::vector<std::size_t> values;
  for (const auto& p : points) {
    if (std::find(values.begin(), values.end(), p.value) == values.end()) values.push_back(p.value);
  }
  for (const auto v : values) {
    const auto med = median_rounds(points, v);
    rows.push_back({{key, v}, {"median_T", med && std::isfinite(*med) ? json(*med) : json(nullptr)}});
  }
  return rows;
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepPoint>& points, const char* key, bool with_alpha) {
  std::ofstream out(path);
  out << key << (with_alpha ? ",alpha" : "") << ",seed,T,note\n";
  out << std::setprecision(17);
  for (const auto& p : points) {
    out << p.value;
    if (with_alpha) out << ',' << p.alpha;
    out << ',' << p.seed << ',';
    if (p.rounds) out << *p.rounds;
    out << ',' << p.note << '\n';
  }
}

}  // namespace

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  config.check();
  const ProblemInstance instance = build_problem(config);
  const Problem& problem = instance.problem;
  const fs::path out_dir(config.out);
  fs::create_directories(out_dir);
  log << "problem " << instance.description << ": M=" << problem.clients() << " d=" << problem.dimension()
      << " L=" << problem.L() << " mu=" << problem.mu() << " kappa=" << problem.kappa() << '\n';
  const ReferenceSolution ref = compute_reference_cached(problem, instance.key, (out_dir / "cache").string());
  log << "reference residual " << optimality_residual(problem, ref) << '\n';

  if (config.mode == "run") {
    const auto result = run_method(problem, ref, config);
    std::ofstream csv(out_dir / "trace.csv");
    write_trace_csv(csv, result.run.trace);
    json summary = result.summary;
    summary["config"] = config_to_json(config);
    write_json(out_dir / "summary.json", summary);
    log << config.method << ": T=" << summary["T"].dump() << " after " << summary["rounds_run"].dump()
        << " rounds\n";
    return 0;
  }
  if (config.mode == "sweep-k") {
    const auto ks = config.k_list.empty() ? default_k_list(problem, config.cohort) : config.k_list;
    const auto points = sweep_T_vs_K(problem, ref, config, ks);
    write_sweep_csv(out_dir / "sweep_k.csv", points, "K", true);
    write_json(out_dir / "summary.json",
               {{"mode", "sweep-k"},
                {"K_star", required_K_gd(problem, config.cohort)},
                {"K_min", thm6_min_steps(problem)},
                {"alpha_max", thm6_alpha_max(problem, config.cohort)},
                {"medians", sweep_summary(points, "K")},
                {"config", config_to_json(config)}});
    for (const auto k : ks) {
      const auto med = median_rounds(points, k);
      log << "K=" << k << " median T=" << (med ? *med : std::numeric_limits<double>::quiet_NaN()) << '\n';
    }
    return 0;
  }
  if (config.mode == "sweep-c") {
    std::vector<std::size_t> cs = config.c_list;
    if (cs.empty()) {
      for (std::size_t c = 1; c <= config.clients; c *= 2) cs.push_back(c);
      if (cs.back() != config.clients) cs.push_back(config.clients);
    }
    const auto points = sweep_T_vs_C(problem, ref, config, cs);
    write_sweep_csv(out_dir / "sweep_c.csv", points, "C", false);
    write_json(out_dir / "summary.json",
               {{"mode", "sweep-c"}, {"medians", sweep_summary(points, "C")}, {"config", config_to_json(config)}});
    for (const auto c : cs) {
      const auto med = median_rounds(points, c);
      log << "C=" << c << " median T=" << (med ? *med : std::numeric_limits<double>::quiet_NaN()) << '\n';
    }
    return 0;
  }
  // contract-test
  const MethodPlan plan = plan_method(config, problem);
  if (!plan.is_5gcs) throw ConfigError("contract-test applies to 5gcs, 5gcs0 and 5gcsinf only");
  const auto report = contraction_test(problem, ref, plan.schedule, plan.options, config.contract_rounds, config.seed);
  {
    std::ofstream csv(out_dir / "contraction.csv");
    csv << "round,psi,expected_next,bound,holds\n" << std::setprecision(17);
    for (const auto& r : report.rows) {
      csv << r.round << ',' << r.psi << ',' << r.expected_next << ',' << r.bound << ',' << (r.holds ? 1 : 0) << '\n';
    }
  }
  const auto violations = std::count_if(report.rows.begin(), report.rows.end(), [](const auto& r) { return !r.holds; });
  write_json(out_dir / "summary.json", {{"mode", "contract-test"},
                                        {"schedule", to_string(plan.schedule.variant)},
                                        {"rho", report.rho},
                                        {"rounds", report.rows.size()},
                                        {"violations", violations},
                                        {"all_hold", report.all_hold()},
                                        {"config", config_to_json(config)}});
  log << "contraction: " << (report.rows.size() - static_cast<std::size_t>(violations)) << '/' << report.rows.size()
      << " rounds satisfy E[psi'] <= (1 - rho) psi with rho=" << report.rho << '\n';
  return report.all_hold() ? 0 : 1;
}

}  // namespace fivegcs
