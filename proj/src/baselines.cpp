#include "fivegcs/baselines.hpp"

#include <cmath>
#include <exception>

namespace fivegcs {

BaselineMethod parse_baseline(const std::string& name) {
  if (name == "gd") return BaselineMethod::gd;
  if (name == "localgd") return BaselineMethod::localgd;
  if (name == "scaffold") return BaselineMethod::scaffold;
  if (name == "proxskip") return BaselineMethod::proxskip;
  throw ConfigError("unknown baseline '" + name + "'");
}

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::gd: return "gd";
    case BaselineMethod::localgd: return "localgd";
    case BaselineMethod::scaffold: return "scaffold";
    case BaselineMethod::proxskip: return "proxskip";
  }
  return "?";
}

BaselineConfig default_baseline(const Problem& problem, BaselineMethod method, std::size_t cohort) {
  if (cohort < 1 || cohort > problem.clients()) throw ConfigError("cohort size outside [1, M]");
  BaselineConfig c;
  c.method = method;
  c.cohort = cohort;
  const double sqrt_kappa = std::sqrt(problem.kappa());
  switch (method) {
    case BaselineMethod::gd:
      c.stepsize = 1.0 / problem.L();
      c.cohort = problem.clients();
      break;
    case BaselineMethod::localgd:
    case BaselineMethod::scaffold:
      c.local_steps = static_cast<std::size_t>(std::ceil(sqrt_kappa));
      c.stepsize = 1.0 / (6.0 * problem.L() * static_cast<double>(c.local_steps));
      break;
    case BaselineMethod::proxskip:
      c.stepsize = 1.0 / problem.L();
      c.probability = std::min(1.0, 1.0 / sqrt_kappa);
      c.local_steps = static_cast<std::size_t>(std::ceil(1.0 / c.probability));
      break;
  }
  return c;
}

namespace {

bool log_row(TraceRecorder& recorder, const Problem& problem, const ReferenceSolution& ref, std::size_t round,
             const Vector& x, std::uint64_t uploads) {
  const double dist = (x - ref.x_star).squaredNorm();
  return recorder.record(round, dist, dist, problem.f(x) - ref.f_star, uploads);
}

// Runs body(i) for each cohort position; results land in per-position slots.
template <typename Body>
void for_cohort(const Cohort& cohort, Execution execution, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(cohort.size());
  if (execution == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fivegcs_baseline_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void check_config(const Problem& problem, const BaselineConfig& config) {
  if (config.cohort < 1 || config.cohort > problem.clients()) throw ConfigError("cohort size outside [1, M]");
  if (!(config.stepsize > 0.0)) throw ConfigError("baseline stepsize must be positive");
  if (config.local_steps < 1) throw ConfigError("baseline needs at least one local step");
}

}  // namespace

RunResult run_gd(const Problem& problem, const ReferenceSolution& ref, double stepsize, const RunControl& control) {
  if (!(stepsize > 0.0)) throw ConfigError("GD stepsize must be positive");
  TraceRecorder recorder(control);
  Vector x = Vector::Zero(problem.dimension());
  std::uint64_t uploads = 0;
  std::size_t round = 0;
  bool stop = log_row(recorder, problem, ref, round, x, uploads);
  while (!stop) {
    x -= stepsize * problem.grad_f(x);
    uploads += problem.clients();
    stop = log_row(recorder, problem, ref, ++round, x, uploads);
  }
  return recorder.finish(x);
}

RunResult run_localgd(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                      const RunControl& control, std::uint64_t seed, Execution execution) {
  check_config(problem, config);
  TraceRecorder recorder(control);
  const auto d = problem.dimension();
  Vector x = Vector::Zero(d);
  std::uint64_t uploads = 0;
  std::size_t round = 0;
  bool stop = log_row(recorder, problem, ref, round, x, uploads);
  while (!stop) {
    const Cohort cohort = draw_cohort(problem.clients(), config.cohort, seed, round);
    BlockVector local(cohort.size());
    for_cohort(cohort, execution, [&](std::size_t i) {
      const auto m = cohort.indices[i];
      Vector y = x;
      for (std::size_t k = 0; k < config.local_steps; ++k) y -= config.stepsize * problem.grad_f_m(m, y);
      local[i] = std::move(y);
    });
    x = block_sum(local, d) / static_cast<double>(cohort.size());
    uploads += cohort.size();
    stop = log_row(recorder, problem, ref, ++round, x, uploads);
  }
  return recorder.finish(x);
}

RunResult run_scaffold(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                       const RunControl& control, std::uint64_t seed, Execution execution) {
  check_config(problem, config);
  TraceRecorder recorder(control);
  const auto d = problem.dimension();
  const double M = static_cast<double>(problem.clients());
  const double k_eta = static_cast<double>(config.local_steps) * config.stepsize;
  Vector x = Vector::Zero(d);
  BlockVector controls(problem.clients(), Vector::Zero(d));
  Vector c = Vector::Zero(d);
  std::uint64_t uploads = 0;
  std::size_t round = 0;
  bool stop = log_row(recorder, problem, ref, round, x, uploads);
  while (!stop) {
    const Cohort cohort = draw_cohort(problem.clients(), config.cohort, seed, round);
    BlockVector local(cohort.size());
    BlockVector new_controls(cohort.size());
    for_cohort(cohort, execution, [&](std::size_t i) {
      const auto m = cohort.indices[i];
      const Vector correction = c - controls[m];
      Vector y = x;
      for (std::size_t k = 0; k < config.local_steps; ++k) {
        y -= config.stepsize * (problem.grad_f_m(m, y) + correction);
      }
      new_controls[i] = controls[m] - c + (x - y) / k_eta;
      local[i] = std::move(y);
    });
    Vector dx = Vector::Zero(d);
    Vector dc = Vector::Zero(d);
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      const auto m = cohort.indices[i];
      dx += local[i] - x;
      dc += new_controls[i] - controls[m];
      controls[m] = new_controls[i];
    }
    x += dx / static_cast<double>(cohort.size());
    c += dc / M;
    uploads += 2 * cohort.size();
    stop = log_row(recorder, problem, ref, ++round, x, uploads);
  }
  return recorder.finish(x);
}

RunResult run_proxskip(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                       const RunControl& control, std::uint64_t seed) {
  check_config(problem, config);
  if (!(config.probability > 0.0 && config.probability <= 1.0)) throw ConfigError("ProxSkip p must lie in (0, 1]");
  TraceRecorder recorder(control);
  const auto d = problem.dimension();
  const double gamma = config.stepsize;
  const double p = config.probability;
  Vector x = Vector::Zero(d);
  BlockVector h(problem.clients(), Vector::Zero(d));
  std::uint64_t uploads = 0;
  std::size_t round = 0;
  bool stop = log_row(recorder, problem, ref, round, x, uploads);
  while (!stop) {
    SeededRng rng(round_seed(seed, round));
    const Cohort cohort = sample_cohort(problem.clients(), config.cohort, rng);
    BlockVector local(cohort.size(), x);
    bool communicate = false;
    while (!communicate) {
      for (std::size_t i = 0; i < cohort.size(); ++i) {
        const auto m = cohort.indices[i];
        local[i] -= gamma * (problem.grad_f_m(m, local[i]) - h[m]);
      }
      communicate = rng.bernoulli(p);
    }
    Vector avg = Vector::Zero(d);
    for (std::size_t i = 0; i < cohort.size(); ++i) avg += local[i] - (gamma / p) * h[cohort.indices[i]];
    avg /= static_cast<double>(cohort.size());
    for (std::size_t i = 0; i < cohort.size(); ++i) h[cohort.indices[i]] += (p / gamma) * (avg - local[i]);
    x = avg;
    uploads += cohort.size();
    stop = log_row(recorder, problem, ref, ++round, x, uploads);
  }
  return recorder.finish(x);
}

RunResult run_baseline(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                       const RunControl& control, std::uint64_t seed, Execution execution) {
  switch (config.method) {
    case BaselineMethod::gd: return run_gd(problem, ref, config.stepsize, control);
    case BaselineMethod::localgd: return run_localgd(problem, ref, config, control, seed, execution);
    case BaselineMethod::scaffold: return run_scaffold(problem, ref, config, control, seed, execution);
    case BaselineMethod::proxskip: return run_proxskip(problem, ref, config, control, seed);
  }
  throw ConfigError("unknown baseline");
}

}  // namespace fivegcs
