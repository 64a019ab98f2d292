#pragma once

#include "fivegcs/local_solvers.hpp"
#include "fivegcs/objective.hpp"
#include "fivegcs/sampling.hpp"
#include "fivegcs/trace.hpp"
#include "fivegcs/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fivegcs {

/// Primal iterate, dual iterates and their running sum v = sum_m u_m.
struct ServerState {
  Vector x;
  BlockVector u;
  Vector v;
  std::size_t round = 0;
  std::uint64_t uploads = 0;
  std::uint64_t broadcasts = 0;

  std::uint64_t communications() const { return uploads + broadcasts; }
};

enum class InitU { gradient, zero };

/// x0 = 0 and u_m = grad F_m(0) (or 0).
ServerState initial_state(const Problem& problem, InitU init = InitU::gradient);

struct ReferenceSolution {
  Vector x_star;
  BlockVector u_star;
  double f_star = 0.0;
};

/// |mu x* + sum_m u*_m|
double optimality_residual(const Problem& problem, const ReferenceSolution& ref);

enum class Variant { thm1, thm2, thm3, thm5, thm6 };

std::string to_string(Variant v);

struct Schedule {
  Variant variant = Variant::thm2;
  double gamma = 0.0;
  double tau = 0.0;
  std::size_t cohort = 1;
  /// Local GD steps; ignored by thm1 (exact prox) and zero for thm3.
  std::size_t local_steps = 0;
  /// Only meaningful for thm6.
  double alpha = 0.0;
};

/// gamma = sqrt(2C / (L_F mu M^2)), tau = sqrt(L_F mu / (2C)), exact prox.
Schedule schedule_thm1(const Problem& problem, std::size_t cohort);
/// gamma = (3/16) sqrt(C / (L mu M)), tau = 1/(2 gamma M), K = required_K_gd.
Schedule schedule_thm2(const Problem& problem, std::size_t cohort);
/// gamma = C / (4 L M), K = 0.
Schedule schedule_thm3(const Problem& problem, std::size_t cohort);
/// gamma = 3/(16 L), tau = 8L/(3M), K = ceil((2 + 3 M L_F/(4L)) log(4 kappa)).
Schedule schedule_thm5(const Problem& problem, std::size_t cohort);
/// tau = max{L/(M(alpha-1)), (8/3) sqrt(L mu/(M C))}, gamma = 1/(2 M tau),
/// K = ceil(2 alpha log(4 kappa)). Requires 1 < alpha < alpha_max.
Schedule schedule_thm6(const Problem& problem, std::size_t cohort, double alpha);
/// 1 + (3/8) sqrt(C kappa / M), the open upper end of the admissible alpha range.
double thm6_alpha_max(const Problem& problem, std::size_t cohort);
/// ceil(2 log(4 kappa)), the smallest K reachable by schedule_thm6.
std::size_t thm6_min_steps(const Problem& problem);

/// Parses "thm1", "thm2", "thm3", "thm5" or "thm6:<alpha>".
Schedule make_schedule(const std::string& name, const Problem& problem, std::size_t cohort);

/// Throws ConfigError if the stepsizes violate the variant's admissibility
/// conditions (gamma tau <= 1/M for thm1, the general gamma/tau coupling and
/// tau lower bound for thm2/thm5/thm6, gamma <= C/(4LM) for thm3).
void validate(const Schedule& schedule, const Problem& problem);

struct LyapunovWeights {
  double primal;
  double dual;
};
LyapunovWeights lyapunov_weights(const Schedule& schedule, const Problem& problem);

/// primal |x - x*|^2 + dual sum_m |u_m - u*_m|^2 with the variant's weights.
double lyapunov(const ServerState& state, const ReferenceSolution& ref, const Schedule& schedule,
                const Problem& problem);

double contraction_rate(const Schedule& schedule, const Problem& problem);

/// Sufficient round count for Psi^T <= eps Psi^0 under the variant's rate.
double rounds_bound(const Schedule& schedule, const Problem& problem, double eps);

/// How a participating client produces u_m^{t+1}.
enum class DualUpdate {
  local_solver,  ///< u = grad F_m(y), y from the configured solver started at x_hat
  point_saga,    ///< u = u + tau x_hat - tau prox(x_hat + u/tau)
  gradient_at_hat,  ///< u = grad F_m(x_hat)
};

/// How the server folds the new duals into v and x.
enum class Aggregation {
  delta,  ///< v += sum of per-client deltas; memory-efficient form
  resum,  ///< v = sum_m u_m recomputed; x uses v^{t+1} - v^t
};

struct RoundOptions {
  DualUpdate update = DualUpdate::local_solver;
  SolverSpec solver;
  Aggregation aggregation = Aggregation::delta;
  Execution execution = Execution::serial;
};

/// x_hat = (x - gamma v) / (1 + gamma mu)
Vector server_extrapolation(const ServerState& state, const Schedule& schedule, const Problem& problem);

/// One round with a given cohort. `seed` is the experiment seed; stochastic
/// solvers derive their stream from (seed, round, client).
ServerState advance(const Problem& problem, const ServerState& state, const Cohort& cohort,
                    const Schedule& schedule, const RoundOptions& options, std::uint64_t seed);

/// Cohort of round t, drawn from the substream seed ^ t.
Cohort draw_cohort(std::size_t clients, std::size_t cohort_size, std::uint64_t seed, std::size_t round);

ServerState round_5gcs(const Problem& problem, const ServerState& state, const Schedule& schedule,
                       const SolverSpec& solver, std::uint64_t seed, Execution execution = Execution::serial);
ServerState round_point_saga(const Problem& problem, const ServerState& state, const Schedule& schedule,
                             std::uint64_t seed, Execution execution = Execution::serial);
ServerState round_zero(const Problem& problem, const ServerState& state, const Schedule& schedule,
                       std::uint64_t seed, Execution execution = Execution::serial);

/// E[Psi(next) | state] by enumerating every cohort; deterministic updates only.
double expected_next_lyapunov(const Problem& problem, const ServerState& state, const ReferenceSolution& ref,
                              const Schedule& schedule, const RoundOptions& options);

/// Runs rounds until psi <= eps psi^0 or max_rounds, logging every round.
RunResult run_5gcs(const Problem& problem, const ReferenceSolution& ref, const Schedule& schedule,
                   const RoundOptions& options, const RunControl& control, std::uint64_t seed,
                   InitU init = InitU::gradient);

}  // namespace fivegcs
