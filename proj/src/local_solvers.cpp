#include "fivegcs/local_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fivegcs {

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "gd") return SolverKind::gd;
  if (name == "lsvrg") return SolverKind::lsvrg;
  if (name == "prox" || name == "exact_prox") return SolverKind::exact_prox;
  throw ConfigError("unknown local solver '" + name + "' (expected gd, lsvrg or prox)");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::gd: return "gd";
    case SolverKind::lsvrg: return "lsvrg";
    case SolverKind::exact_prox: return "prox";
  }
  return "?";
}

double gd_stepsize(const LocalSubproblem& sub, GdStepPolicy policy) {
  const double lf = policy == GdStepPolicy::per_client ? sub.problem->L_F_client(sub.client) : sub.problem->L_F();
  return 1.0 / (lf + sub.tau);
}

Vector gd_solve(const LocalSubproblem& sub, const Vector& y0, std::size_t steps, double stepsize) {
  Vector y = y0;
  for (std::size_t k = 0; k < steps; ++k) y -= stepsize * sub.gradient(y);
  return y;
}

double default_prox_tol(const Vector& center, double rel) { return rel * std::max(1.0, center.norm()); }

namespace {

Vector prox_by_gd(const LocalSubproblem& sub, double tol) {
  const double step = 1.0 / sub.smoothness();
  Vector y = sub.center;
  for (int it = 0; it < 10000; ++it) {
    const Vector g = sub.gradient(y);
    if (g.norm() <= tol) return y;
    y -= step * g;
  }
  throw ConvergenceError("exact_prox: gradient descent did not reach tolerance in 10000 iterations");
}

}  // namespace

Vector exact_prox(const LocalSubproblem& sub, double tol) {
  if (!(tol > 0.0)) throw ConfigError("exact_prox: tolerance must be positive");
  const auto d = sub.problem->dimension();
  if (d > 2000) return prox_by_gd(sub, tol);

  Vector y = sub.center;
  const Matrix identity = Matrix::Identity(d, d);
  for (int it = 0; it < 10000; ++it) {
    const Vector g = sub.gradient(y);
    const double gnorm = g.norm();
    if (gnorm <= tol) return y;

    const Matrix h = sub.problem->hess_F_m(sub.client, y) + sub.tau * identity;
    const Eigen::LLT<Matrix> llt(h);
    const Vector step = llt.solve(-g);

    // Armijo on psi; near the optimum psi differences drop below roundoff, so
    // a step that halves the gradient norm is accepted as well.
    const double psi0 = sub.value(y);
    const double slope = g.dot(step);
    double t = 1.0;
    Vector trial = y + step;
    while (t > 1e-12) {
      trial = y + t * step;
      if (sub.value(trial) <= psi0 + 1e-4 * t * slope) break;
      if (sub.gradient(trial).norm() <= 0.5 * gnorm) break;
      t *= 0.5;
    }
    if (t <= 1e-12) {
      throw ConvergenceError("exact_prox: line search failed at |grad| = " + std::to_string(gnorm));
    }
    y = trial;
  }
  throw ConvergenceError("exact_prox: Newton did not reach tolerance in 10000 iterations");
}

Vector exact_prox(const Problem& problem, std::size_t m, double tau, const Vector& center, double tol) {
  return exact_prox(LocalSubproblem{&problem, m, tau, center}, tol);
}

// ------------------------------------------------------------------- L-SVRG

double lsvrg_expected_smoothness(const LocalSubproblem& sub, std::size_t batch) {
  const Loss& loss = sub.problem->loss(sub.client);
  const std::size_t n = loss.components();
  if (batch < 1 || batch > n) {
    throw ConfigError("L-SVRG batch " + std::to_string(batch) + " outside [1, " + std::to_string(n) + "]");
  }
  const double psi_smooth = sub.smoothness();
  if (n == 1) return psi_smooth;
  const double M = static_cast<double>(sub.problem->clients());
  double max_component = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_component = std::max(max_component, loss.component_smoothness(i) / M + sub.tau);
  const double nd = static_cast<double>(n);
  const double b = static_cast<double>(batch);
  return (nd - b) / (b * (nd - 1.0)) * max_component + nd * (b - 1.0) / (b * (nd - 1.0)) * psi_smooth;
}

LsvrgParams lsvrg_params(const LocalSubproblem& sub, std::size_t batch) {
  const double a = lsvrg_expected_smoothness(sub, batch);
  const double step = 1.0 / (6.0 * a);
  return LsvrgParams{step, std::min(1.0, 2.0 * sub.tau * step)};
}

Vector lsvrg_estimator(const LocalSubproblem& sub, const Vector& y, const Vector& anchor,
                       const Vector& anchor_gradient, const std::vector<std::size_t>& batch) {
  const Loss& loss = sub.problem->loss(sub.client);
  const double M = static_cast<double>(sub.problem->clients());
  const double scale = 1.0 / (static_cast<double>(batch.size()) * M);
  Vector g = anchor_gradient + sub.tau * (y - anchor);
  for (const std::size_t i : batch) {
    loss.add_component_gradient(i, y, scale, g);
    loss.add_component_gradient(i, anchor, -scale, g);
  }
  return g;
}

Vector lsvrg_solve(const LocalSubproblem& sub, const Vector& y0, std::size_t steps, std::size_t batch,
                   SeededRng& rng) {
  const auto params = lsvrg_params(sub, batch);
  const std::size_t n = sub.problem->loss(sub.client).components();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> chosen(batch);

  Vector x = y0;
  Vector anchor = y0;
  Vector anchor_gradient = sub.gradient(anchor);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < batch; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
      std::swap(order[i], order[j]);
      chosen[i] = order[i];
    }
    const Vector g = lsvrg_estimator(sub, x, anchor, anchor_gradient, chosen);
    const Vector previous = x;
    x -= params.stepsize * g;
    if (rng.bernoulli(params.probability)) {
      anchor = previous;
      anchor_gradient = sub.gradient(anchor);
    }
  }
  return x;
}

Vector solve_local(const LocalSubproblem& sub, const Vector& y0, const SolverSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case SolverKind::gd:
      return gd_solve(sub, y0, spec.steps_for(sub.client), gd_stepsize(sub, spec.gd_policy));
    case SolverKind::lsvrg: {
      SeededRng rng(seed);
      return lsvrg_solve(sub, y0, spec.steps_for(sub.client), spec.batch, rng);
    }
    case SolverKind::exact_prox:
      return exact_prox(sub, default_prox_tol(sub.center, spec.prox_rel_tol));
  }
  throw ConfigError("solve_local: unknown solver");
}

// -------------------------------------------------------- step-count theory

std::size_t required_K_gd(const Problem& problem, std::size_t cohort_size) {
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(cohort_size);
  const double L = problem.L();
  const double mu = problem.mu();
  const double k = (0.75 * std::sqrt(C * L / (M * mu)) + 2.0) * std::log(4.0 * L / mu);
  return static_cast<std::size_t>(std::ceil(k));
}

std::size_t required_K_gd_personalized(const Problem& problem, std::size_t m, std::size_t cohort_size) {
  const double M = static_cast<double>(problem.clients());
  const double C = static_cast<double>(cohort_size);
  const double L = problem.L();
  const double Lm = problem.L_client(m);
  const double mu = problem.mu();
  // The L_m-driven term is absent when client m is perfectly conditioned.
  const double drift = Lm > mu ? 0.375 * std::sqrt(C * Lm * Lm / (L * mu * M)) : 0.0;
  const double k = 2.0 * (drift + 1.0) * std::log(4.0 * L / mu);
  return static_cast<std::size_t>(std::ceil(k));
}

double delta_tolerance(double mu, std::size_t clients, double tau, double L_F) {
  if (L_F <= 0.0) return std::numeric_limits<double>::infinity();
  const double M = static_cast<double>(clients);
  const double a = L_F / tau;
  const double denom = 4.0 * mu * L_F * L_F / (3.0 * M * tau * tau) + a * (L_F + tau) * (L_F + tau) / tau;
  return (mu / (6.0 * M)) / denom;
}

double delta_inverse_bound(double L, double mu) {
  const double r = 4.0 * L / mu;
  return r * r;
}

GtpsCheck check_gtps(const Problem& problem, double tau, const Vector& x_hat, const BlockVector& u,
                     const BlockVector& y, const BlockVector& y_star) {
  const std::size_t M = problem.clients();
  const double mu = problem.mu();
  const double lf = problem.L_F();
  const double Md = static_cast<double>(M);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const auto sub = LocalSubproblem::make(problem, m, tau, x_hat, u[m]);
    lhs += 4.0 / (tau * tau) * (mu * lf * lf / (3.0 * Md)) * (y[m] - y_star[m]).squaredNorm();
    lhs += lf / (tau * tau) * sub.gradient(y[m]).squaredNorm();
    rhs += mu / (6.0 * Md) * (x_hat - y_star[m]).squaredNorm();
  }
  return GtpsCheck{lhs <= rhs, lhs, rhs};
}

GtpsCheck check_gtps(const Problem& problem, double tau, const Vector& x_hat, const BlockVector& u,
                     const BlockVector& y) {
  BlockVector y_star;
  y_star.reserve(problem.clients());
  for (std::size_t m = 0; m < problem.clients(); ++m) {
    const auto sub = LocalSubproblem::make(problem, m, tau, x_hat, u[m]);
    y_star.push_back(exact_prox(sub, default_prox_tol(sub.center)));
  }
  return check_gtps(problem, tau, x_hat, u, y, y_star);
}

}  // namespace fivegcs
