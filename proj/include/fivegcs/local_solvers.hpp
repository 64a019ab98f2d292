#pragma once

#include "fivegcs/objective.hpp"
#include "fivegcs/sampling.hpp"
#include "fivegcs/types.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fivegcs {

enum class SolverKind { gd, lsvrg, exact_prox };

/// Which smoothness constant sets the local GD stepsize 1/(L + tau).
enum class GdStepPolicy {
  per_client,    ///< L_F^(m), the client's own constant
  conservative,  ///< global L_F
};

struct SolverSpec {
  SolverKind kind = SolverKind::gd;
  /// K, the local step budget. Unused by exact_prox (K = infinity).
  std::size_t local_steps = 0;
  /// Optional per-client budgets K_m; overrides local_steps when non-empty.
  std::vector<std::size_t> client_steps;
  GdStepPolicy gd_policy = GdStepPolicy::per_client;
  /// L-SVRG minibatch size b_m.
  std::size_t batch = 1;
  /// Relative tolerance of the exact prox oracle.
  double prox_rel_tol = 1e-12;

  std::size_t steps_for(std::size_t m) const { return client_steps.empty() ? local_steps : client_steps.at(m); }
};

SolverKind parse_solver_kind(const std::string& name);
std::string to_string(SolverKind kind);

/// GD stepsize on psi_m under the given policy.
double gd_stepsize(const LocalSubproblem& sub, GdStepPolicy policy);

/// K steps of y <- y - stepsize * grad psi(y) from y0. K = 0 returns y0.
Vector gd_solve(const LocalSubproblem& sub, const Vector& y0, std::size_t steps, double stepsize);

/// argmin psi_m by damped Newton (Cholesky on the d x d Hessian); for
/// d > 2000, GD with stepsize 1/(L_F^(m) + tau). Returns y with
/// |grad psi(y)| <= tol. Throws ConvergenceError after 10,000 iterations.
Vector exact_prox(const LocalSubproblem& sub, double tol);
Vector exact_prox(const Problem& problem, std::size_t m, double tau, const Vector& center, double tol);
/// 1e-12 * max(1, |center|)
double default_prox_tol(const Vector& center, double rel = 1e-12);

/// Expected-smoothness constant A'' of the size-b minibatch estimator over
/// the components g_i(y) = (1/M) l_{m,i}(y) + (tau/2)|y - center|^2.
double lsvrg_expected_smoothness(const LocalSubproblem& sub, std::size_t batch);

struct LsvrgParams {
  double stepsize;     ///< 1 / (6 A'')
  double probability;  ///< 2 tau * stepsize
};
LsvrgParams lsvrg_params(const LocalSubproblem& sub, std::size_t batch);

/// K iterations of loopless SVRG with a size-b minibatch estimator, sampled
/// without replacement. One Bernoulli(p) anchor draw per iteration.
Vector lsvrg_solve(const LocalSubproblem& sub, const Vector& y0, std::size_t steps, std::size_t batch,
                   SeededRng& rng);

/// Minibatch estimator (1/b) sum_{i in batch} (grad g_i(y) - grad g_i(anchor)) + grad psi(anchor).
Vector lsvrg_estimator(const LocalSubproblem& sub, const Vector& y, const Vector& anchor,
                       const Vector& anchor_gradient, const std::vector<std::size_t>& batch);

/// Runs the configured solver from y0. `seed` feeds stochastic solvers only.
Vector solve_local(const LocalSubproblem& sub, const Vector& y0, const SolverSpec& spec, std::uint64_t seed);

/// ceil((3/4 sqrt(C L / (M mu)) + 2) log(4 L / mu)): GD steps that certify
/// the accuracy condition under the maximal-gamma schedule.
std::size_t required_K_gd(const Problem& problem, std::size_t cohort_size);
/// ceil(2 (3/8 sqrt(C L_m^2 / (L mu M)) + 1) log(4 L / mu)) for client m.
std::size_t required_K_gd_personalized(const Problem& problem, std::size_t m, std::size_t cohort_size);

/// Relative accuracy |y - y*|^2 <= delta |x_hat - y*|^2 that implies the
/// accuracy condition; +infinity when L_F = 0.
double delta_tolerance(double mu, std::size_t clients, double tau, double L_F);
/// (4 L / mu)^2, an upper bound on 1/delta for admissible tau.
double delta_inverse_bound(double L, double mu);

struct GtpsCheck {
  bool satisfied;
  double lhs;
  double rhs;
};

/// Evaluates sum_m (4/tau^2)(mu L_F^2/(3M))|y_m - y_m*|^2 + (L_F/tau^2)|grad psi_m(y_m)|^2
/// against sum_m (mu/(6M))|x_hat - y_m*|^2.
GtpsCheck check_gtps(const Problem& problem, double tau, const Vector& x_hat, const BlockVector& u,
                     const BlockVector& y, const BlockVector& y_star);
/// Same, with y_m* from exact_prox.
GtpsCheck check_gtps(const Problem& problem, double tau, const Vector& x_hat, const BlockVector& u,
                     const BlockVector& y);

}  // namespace fivegcs
