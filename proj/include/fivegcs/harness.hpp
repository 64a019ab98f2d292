#pragma once

#include "fivegcs/algorithms.hpp"
#include "fivegcs/baselines.hpp"
#include "fivegcs/objective.hpp"
#include "fivegcs/trace.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fivegcs {

struct ExperimentConfig {
  std::string data;
  std::string synthetic;
  std::size_t clients = 5;
  std::size_t cohort = 5;
  /// 5gcs, 5gcs0, 5gcsinf, gd, localgd, scaffold or proxskip.
  std::string method = "5gcs";
  /// Empty selects the method's natural schedule: thm2, thm3 or thm1.
  std::string schedule;
  /// gd, lsvrg or prox. Empty selects prox for thm1 and gd otherwise.
  std::string local_solver;
  /// Overrides the schedule's K when set.
  std::optional<std::size_t> local_steps;
  std::size_t batch = 1;
  bool conservative = false;
  /// "grad" (u_m = grad F_m(0)) or "zero".
  std::string init_u = "grad";
  double eps = 1e-6;
  std::uint64_t seed = 0;
  std::size_t max_rounds = 100000;
  /// Condition number used for --data inputs: lambda = L_data / (kappa - 1).
  double kappa = 1000.0;
  std::string out = "out";
  /// run, sweep-k, sweep-c or contract-test.
  std::string mode = "run";
  bool wall_time = true;
  bool parallel = false;
  std::vector<std::size_t> k_list;
  std::vector<std::size_t> c_list;
  /// Seeds per sweep point: seed, seed+1, ...
  std::size_t seeds = 5;
  std::size_t contract_rounds = 100;

  /// Throws ConfigError on inconsistent fields.
  void check() const;
};

/// Reads any subset of the fields above from a JSON object; keys use the CLI
/// spelling without dashes (e.g. "local-steps").
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& config);

/// A problem together with a stable key describing its inputs.
struct ProblemInstance {
  Problem problem;
  std::uint64_t key;
  std::string description;
};
ProblemInstance build_problem(const ExperimentConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Minimizes f by damped Newton (d <= 2000) or GD with stepsize 1/L until
/// |grad f| <= tol * max(1, |grad f(0)|); u*_m = grad F_m(x*).
ReferenceSolution compute_reference(const Problem& problem, double tol = 1e-12);
/// As above, memoized in `cache_dir` under a file named after `key` and lambda.
ReferenceSolution compute_reference_cached(const Problem& problem, std::uint64_t key, const std::string& cache_dir,
                                           double tol = 1e-12);

/// Everything a run needs besides the problem.
struct MethodPlan {
  bool is_5gcs = true;
  Schedule schedule;
  RoundOptions options;
  BaselineConfig baseline;
  InitU init = InitU::gradient;
};
MethodPlan plan_method(const ExperimentConfig& config, const Problem& problem);

struct ExperimentResult {
  RunResult run;
  nlohmann::json summary;
};

/// Runs one configuration on a prepared problem.
ExperimentResult run_method(const Problem& problem, const ReferenceSolution& ref, const ExperimentConfig& config);

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

struct SweepPoint {
  std::size_t value;  ///< K or C
  double alpha = 0.0;
  std::uint64_t seed;
  std::optional<std::size_t> rounds;
  std::string note;
};

/// thm6 schedule with alpha = K / (2 log 4 kappa); K with alpha >= alpha_max
/// keep the alpha_max stepsizes (the thm2 pair) and only add local steps.
/// K with alpha <= 1 are rejected and reported with an empty T.
std::vector<SweepPoint> sweep_T_vs_K(const Problem& problem, const ReferenceSolution& ref,
                                     const ExperimentConfig& config, const std::vector<std::size_t>& ks);
/// The default K grid: ceil(2 log 4 kappa), K*, 2K*, 10K*, 200 and a few between.
std::vector<std::size_t> default_k_list(const Problem& problem, std::size_t cohort);

/// Runs config for each cohort size in cs.
std::vector<SweepPoint> sweep_T_vs_C(const Problem& problem, const ReferenceSolution& ref,
                                     const ExperimentConfig& config, const std::vector<std::size_t>& cs);

/// Median of T over the points sharing `value`; unreached runs count as +inf.
std::optional<double> median_rounds(const std::vector<SweepPoint>& points, std::size_t value);

struct ContractionRow {
  std::size_t round;
  double psi;
  double expected_next;
  double bound;
  bool holds;
};
struct ContractionReport {
  double rho;
  std::vector<ContractionRow> rows;
  bool all_hold() const;
};

/// Follows one sampled trajectory and at each state compares the exact
/// cohort-enumerated E[Psi^{t+1}] with (1 - rho) Psi^t + slack * Psi^t.
ContractionReport contraction_test(const Problem& problem, const ReferenceSolution& ref, const Schedule& schedule,
                                   const RoundOptions& options, std::size_t rounds, std::uint64_t seed,
                                   double slack = 1e-9);

/// Dispatches on config.mode and writes CSV/JSON under config.out. Returns
/// the process exit code.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace fivegcs
