#include "fivegcs/algorithms.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace fivegcs {

ServerState initial_state(const Problem& problem, InitU init) {
  const auto d = problem.dimension();
  ServerState s;
  s.x = Vector::Zero(d);
  s.u.reserve(problem.clients());
  for (std::size_t m = 0; m < problem.clients(); ++m) {
    s.u.push_back(init == InitU::gradient ? problem.grad_F_m(m, s.x) : Vector(Vector::Zero(d)));
  }
  s.v = block_sum(s.u, d);
  return s;
}

double optimality_residual(const Problem& problem, const ReferenceSolution& ref) {
  return (problem.mu() * ref.x_star + block_sum(ref.u_star, problem.dimension())).norm();
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::thm1: return "thm1";
    case Variant::thm2: return "thm2";
    case Variant::thm3: return "thm3";
    case Variant::thm5: return "thm5";
    case Variant::thm6: return "thm6";
  }
  return "?";
}

namespace {

void check_cohort(const Problem& problem, std::size_t cohort) {
  if (cohort < 1 || cohort > problem.clients()) {
    throw ConfigError("cohort size " + std::to_string(cohort) + " outside [1, " + std::to_string(problem.clients()) +
                      "]");
  }
}

double tau_floor(const Problem& problem, std::size_t cohort) {
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(cohort);
  return (8.0 / 3.0) * std::sqrt(problem.L() * problem.mu() / (M * C));
}

std::size_t ceil_steps(double k) { return static_cast<std::size_t>(std::ceil(k)); }

}  // namespace

Schedule schedule_thm1(const Problem& problem, std::size_t cohort) {
  check_cohort(problem, cohort);
  const double lf = problem.L_F();
  if (!(lf > 0.0)) {
    throw ConfigError("thm1 schedule needs L_F > 0; with L = mu every prox is affine, use thm3 instead");
  }
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(cohort);
  Schedule s;
  s.variant = Variant::thm1;
  s.cohort = cohort;
  s.gamma = std::sqrt(2.0 * C / (lf * problem.mu() * M * M));
  s.tau = std::sqrt(lf * problem.mu() / (2.0 * C));
  return s;
}

Schedule schedule_thm2(const Problem& problem, std::size_t cohort) {
  check_cohort(problem, cohort);
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(cohort);
  Schedule s;
  s.variant = Variant::thm2;
  s.cohort = cohort;
  s.gamma = (3.0 / 16.0) * std::sqrt(C / (problem.L() * problem.mu() * M));
  s.tau = 1.0 / (2.0 * s.gamma * M);
  s.local_steps = required_K_gd(problem, cohort);
  return s;
}

Schedule schedule_thm3(const Problem& problem, std::size_t cohort) {
  check_cohort(problem, cohort);
  Schedule s;
  s.variant = Variant::thm3;
  s.cohort = cohort;
  s.gamma = static_cast<double>(cohort) / (4.0 * problem.L() * static_cast<double>(problem.clients()));
  s.local_steps = 0;
  return s;
}

Schedule schedule_thm5(const Problem& problem, std::size_t cohort) {
  check_cohort(problem, cohort);
  const double M = static_cast<double>(problem.clients());
  const double L = problem.L();
  Schedule s;
  s.variant = Variant::thm5;
  s.cohort = cohort;
  s.gamma = 3.0 / (16.0 * L);
  s.tau = 8.0 * L / (3.0 * M);
  s.local_steps = ceil_steps((2.0 + 3.0 * M * problem.L_F() / (4.0 * L)) * std::log(4.0 * problem.kappa()));
  return s;
}

double thm6_alpha_max(const Problem& problem, std::size_t cohort) {
  const double ratio = static_cast<double>(cohort) / static_cast<double>(problem.clients());
  return 1.0 + 0.375 * std::sqrt(ratio * problem.kappa());
}

std::size_t thm6_min_steps(const Problem& problem) { return ceil_steps(2.0 * std::log(4.0 * problem.kappa())); }

Schedule schedule_thm6(const Problem& problem, std::size_t cohort, double alpha) {
  check_cohort(problem, cohort);
  const double alpha_max = thm6_alpha_max(problem, cohort);
  if (!(alpha > 1.0 && alpha < alpha_max)) {
    throw ConfigError("thm6 alpha " + std::to_string(alpha) + " outside (1, " + std::to_string(alpha_max) + ")");
  }
  const double M = static_cast<double>(problem.clients());
  Schedule s;
  s.variant = Variant::thm6;
  s.cohort = cohort;
  s.alpha = alpha;
  s.tau = std::max(problem.L() / (M * (alpha - 1.0)), tau_floor(problem, cohort));
  s.gamma = 1.0 / (2.0 * M * s.tau);
  s.local_steps = ceil_steps(2.0 * alpha * std::log(4.0 * problem.kappa()));
  return s;
}

Schedule make_schedule(const std::string& name, const Problem& problem, std::size_t cohort) {
  if (name == "thm1") return schedule_thm1(problem, cohort);
  if (name == "thm2") return schedule_thm2(problem, cohort);
  if (name == "thm3") return schedule_thm3(problem, cohort);
  if (name == "thm5") return schedule_thm5(problem, cohort);
  if (name.rfind("thm6:", 0) == 0) {
    const std::string arg = name.substr(5);
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw ConfigError("thm6 needs a numeric alpha, got '" + arg + "'");
    return schedule_thm6(problem, cohort, alpha);
  }
  throw ConfigError("unknown schedule '" + name + "' (expected thm1, thm2, thm3, thm5 or thm6:<alpha>)");
}

void validate(const Schedule& s, const Problem& problem) {
  check_cohort(problem, s.cohort);
  constexpr double slack = 1e-12;
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(s.cohort);
  const double mu = problem.mu();
  if (!(s.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  switch (s.variant) {
    case Variant::thm1:
      if (!(s.tau > 0.0)) throw ConfigError("tau must be positive");
      if (!(problem.L_F() > 0.0)) throw ConfigError("thm1 needs L_F > 0");
      if (s.gamma * s.tau > (1.0 + slack) / M) throw ConfigError("thm1 requires gamma * tau <= 1/M");
      return;
    case Variant::thm3:
      if (s.gamma > (1.0 + slack) * C / (4.0 * problem.L() * M)) throw ConfigError("thm3 requires gamma <= C/(4LM)");
      return;
    case Variant::thm2:
      if (s.gamma > (1.0 + slack) * (3.0 / 16.0) * std::sqrt(C / (problem.L() * mu * M))) {
        throw ConfigError("thm2 requires gamma <= (3/16) sqrt(C/(L mu M))");
      }
      [[fallthrough]];
    case Variant::thm5:
    case Variant::thm6: {
      if (!(s.tau > 0.0)) throw ConfigError("tau must be positive");
      if (!(problem.L_F() > 0.0)) throw ConfigError(to_string(s.variant) + " Lyapunov weights need L_F > 0");
      if (s.tau < (1.0 - slack) * tau_floor(problem, s.cohort)) {
        throw ConfigError(to_string(s.variant) + " requires tau >= (8/3) sqrt(L mu/(M C))");
      }
      const double cap = (1.0 / (s.tau * M)) * (1.0 - 4.0 * mu / (3.0 * M * s.tau));
      if (s.gamma > (1.0 + slack) * cap) {
        throw ConfigError(to_string(s.variant) + " requires gamma <= (1/(tau M))(1 - 4 mu/(3 M tau))");
      }
      return;
    }
  }
}

LyapunovWeights lyapunov_weights(const Schedule& s, const Problem& problem) {
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(s.cohort);
  const double lf = problem.L_F();
  switch (s.variant) {
    case Variant::thm3:
      return {C / (M * M * s.gamma * s.gamma) * (1.0 - std::sqrt(s.gamma * M * lf / 2.0)), 1.0};
    case Variant::thm1:
      if (!(lf > 0.0)) throw ConfigError("thm1 Lyapunov weights need L_F > 0");
      return {1.0 / s.gamma, (M / C) * (1.0 / s.tau + 2.0 / lf)};
    case Variant::thm2:
    case Variant::thm5:
    case Variant::thm6:
      if (!(lf > 0.0)) throw ConfigError(to_string(s.variant) + " Lyapunov weights need L_F > 0");
      return {1.0 / s.gamma, (M / C) * (1.0 / s.tau + 1.0 / lf)};
  }
  throw ConfigError("unknown variant");
}

double lyapunov(const ServerState& state, const ReferenceSolution& ref, const Schedule& schedule,
                const Problem& problem) {
  const auto w = lyapunov_weights(schedule, problem);
  double dual = 0.0;
  for (std::size_t m = 0; m < state.u.size(); ++m) dual += (state.u[m] - ref.u_star[m]).squaredNorm();
  return w.primal * (state.x - ref.x_star).squaredNorm() + w.dual * dual;
}

double contraction_rate(const Schedule& s, const Problem& problem) {
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(s.cohort);
  const double lf = problem.L_F();
  const double gm = s.gamma * problem.mu();
  const double primal = gm / (1.0 + gm);
  double dual = 0.0;
  switch (s.variant) {
    case Variant::thm1: dual = (C / M) * 2.0 * s.tau / (lf + 2.0 * s.tau); break;
    case Variant::thm3: dual = C / (M + 2.0 * s.gamma * lf * M * M); break;
    case Variant::thm2:
    case Variant::thm5:
    case Variant::thm6: dual = (C / M) * s.tau / (lf + s.tau); break;
  }
  return std::min(primal, dual);
}

double rounds_bound(const Schedule& s, const Problem& problem, double eps) {
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(s.cohort);
  const double L = problem.L();
  const double mu = problem.mu();
  const double kappa = problem.kappa();
  const double lf = problem.L_F();
  const double log_eps = std::log(1.0 / eps);
  switch (s.variant) {
    case Variant::thm1:
      return (M / C + std::sqrt((M / C) * (L - mu) / (2.0 * mu))) * log_eps;
    case Variant::thm2:
      return std::max(1.0 + (16.0 / 3.0) * std::sqrt((M / C) * kappa), M / C + 0.375 * std::sqrt((M / C) * kappa)) *
             log_eps;
    case Variant::thm3:
      return std::max(1.0 + 4.0 * (M / C) * kappa, M / C + lf * M / L) * log_eps;
    case Variant::thm5:
      return std::max(1.0 + 16.0 * kappa / 3.0, M / C + (3.0 * M / (8.0 * C)) * (M * lf / L)) * log_eps;
    case Variant::thm6:
      return std::max(1.0 + 2.0 * kappa / (s.alpha - 1.0), (M / C) * s.alpha) * log_eps;
  }
  return 0.0;
}

Vector server_extrapolation(const ServerState& state, const Schedule& schedule, const Problem& problem) {
  return (state.x - schedule.gamma * state.v) / (1.0 + schedule.gamma * problem.mu());
}

namespace {

Vector client_dual(const Problem& problem, std::size_t m, const Vector& x_hat, const Vector& u_m,
                   const Schedule& schedule, const RoundOptions& options, std::uint64_t seed, std::size_t round) {
  switch (options.update) {
    case DualUpdate::gradient_at_hat:
      return problem.grad_F_m(m, x_hat);
    case DualUpdate::point_saga: {
      const auto sub = LocalSubproblem::make(problem, m, schedule.tau, x_hat, u_m);
      const Vector y = exact_prox(sub, default_prox_tol(sub.center, options.solver.prox_rel_tol));
      return u_m + schedule.tau * x_hat - schedule.tau * y;
    }
    case DualUpdate::local_solver: {
      if (options.solver.kind != SolverKind::exact_prox && options.solver.steps_for(m) == 0) {
        return problem.grad_F_m(m, x_hat);
      }
      const auto sub = LocalSubproblem::make(problem, m, schedule.tau, x_hat, u_m);
      const Vector y = solve_local(sub, x_hat, options.solver, solver_seed(seed, round, m));
      return problem.grad_F_m(m, y);
    }
  }
  throw ConfigError("unknown dual update");
}

// Computes u_m^{t+1} for every listed client into its own slot.
BlockVector client_duals(const Problem& problem, const std::vector<std::size_t>& clients, const Vector& x_hat,
                         const ServerState& state, const Schedule& schedule, const RoundOptions& options,
                         std::uint64_t seed) {
  BlockVector out(clients.size());
  const auto n = static_cast<std::ptrdiff_t>(clients.size());
  if (options.execution == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto m = clients[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = client_dual(problem, m, x_hat, state.u[m], schedule, options, seed, state.round);
    }
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto m = clients[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = client_dual(problem, m, x_hat, state.u[m], schedule, options, seed, state.round);
    } catch (...) {
#pragma omp critical(fivegcs_round_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ServerState aggregate(const Problem& problem, const ServerState& state, const Cohort& cohort, const Vector& x_hat,
                      const BlockVector& new_duals, const Schedule& schedule, Aggregation aggregation) {
  const auto d = problem.dimension();
  const double scale = schedule.gamma * static_cast<double>(problem.clients()) / static_cast<double>(cohort.size());
  ServerState next;
  next.u = state.u;
  next.round = state.round + 1;
  next.uploads = state.uploads + cohort.size();
  next.broadcasts = state.broadcasts + cohort.size();

  if (aggregation == Aggregation::delta) {
    Vector dv = Vector::Zero(d);
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      const auto m = cohort.indices[i];
      dv += new_duals[i] - state.u[m];
      next.u[m] = new_duals[i];
    }
    next.x = x_hat - scale * dv;
    next.v = state.v + dv;
  } else {
    for (std::size_t i = 0; i < cohort.size(); ++i) next.u[cohort.indices[i]] = new_duals[i];
    next.v = block_sum(next.u, d);
    next.x = x_hat - scale * (next.v - state.v);
  }
  return next;
}

}  // namespace

ServerState advance(const Problem& problem, const ServerState& state, const Cohort& cohort, const Schedule& schedule,
                    const RoundOptions& options, std::uint64_t seed) {
  const Vector x_hat = server_extrapolation(state, schedule, problem);
  const BlockVector duals = client_duals(problem, cohort.indices, x_hat, state, schedule, options, seed);
  return aggregate(problem, state, cohort, x_hat, duals, schedule, options.aggregation);
}

Cohort draw_cohort(std::size_t clients, std::size_t cohort_size, std::uint64_t seed, std::size_t round) {
  SeededRng rng(round_seed(seed, round));
  return sample_cohort(clients, cohort_size, rng);
}

ServerState round_5gcs(const Problem& problem, const ServerState& state, const Schedule& schedule,
                       const SolverSpec& solver, std::uint64_t seed, Execution execution) {
  RoundOptions options;
  options.solver = solver;
  options.execution = execution;
  return advance(problem, state, draw_cohort(problem.clients(), schedule.cohort, seed, state.round), schedule,
                 options, seed);
}

ServerState round_point_saga(const Problem& problem, const ServerState& state, const Schedule& schedule,
                             std::uint64_t seed, Execution execution) {
  RoundOptions options;
  options.update = DualUpdate::point_saga;
  options.solver.kind = SolverKind::exact_prox;
  options.execution = execution;
  return advance(problem, state, draw_cohort(problem.clients(), schedule.cohort, seed, state.round), schedule,
                 options, seed);
}

ServerState round_zero(const Problem& problem, const ServerState& state, const Schedule& schedule,
                       std::uint64_t seed, Execution execution) {
  RoundOptions options;
  options.update = DualUpdate::gradient_at_hat;
  options.execution = execution;
  return advance(problem, state, draw_cohort(problem.clients(), schedule.cohort, seed, state.round), schedule,
                 options, seed);
}

double expected_next_lyapunov(const Problem& problem, const ServerState& state, const ReferenceSolution& ref,
                              const Schedule& schedule, const RoundOptions& options) {
  if (options.update == DualUpdate::local_solver && options.solver.kind == SolverKind::lsvrg) {
    throw ConfigError("exact expectation needs a deterministic local solver");
  }
  // A client's new dual does not depend on who else is in the cohort, so
  // every client is solved once and the cohorts only differ in aggregation.
  std::vector<std::size_t> everyone(problem.clients());
  for (std::size_t m = 0; m < everyone.size(); ++m) everyone[m] = m;
  const Vector x_hat = server_extrapolation(state, schedule, problem);
  const BlockVector all = client_duals(problem, everyone, x_hat, state, schedule, options, 0);

  const auto cohorts = enumerate_cohorts(problem.clients(), schedule.cohort);
  double total = 0.0;
  for (const auto& cohort : cohorts) {
    BlockVector duals;
    duals.reserve(cohort.size());
    for (const auto m : cohort.indices) duals.push_back(all[m]);
    const auto next = aggregate(problem, state, cohort, x_hat, duals, schedule, options.aggregation);
    total += lyapunov(next, ref, schedule, problem);
  }
  return total / static_cast<double>(cohorts.size());
}

RunResult run_5gcs(const Problem& problem, const ReferenceSolution& ref, const Schedule& schedule,
                   const RoundOptions& options, const RunControl& control, std::uint64_t seed, InitU init) {
  TraceRecorder recorder(control);
  ServerState state = initial_state(problem, init);
  auto log = [&] {
    return recorder.record(state.round, lyapunov(state, ref, schedule, problem),
                           (state.x - ref.x_star).squaredNorm(), problem.f(state.x) - ref.f_star, state.uploads);
  };
  bool stop = log();
  while (!stop) {
    state = advance(problem, state, draw_cohort(problem.clients(), schedule.cohort, seed, state.round), schedule,
                    options, seed);
    stop = log();
  }
  return recorder.finish(state.x);
}

}  // namespace fivegcs
