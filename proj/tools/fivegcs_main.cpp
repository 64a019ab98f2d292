#include "fivegcs/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  CLI::App app{"fivegcs: federated optimization with local training and client sampling"};
  fivegcs::ExperimentConfig cfg;

  std::string config_path;
  std::string data, synthetic, method, schedule, local_solver, init_u, out, mode;
  std::size_t clients = 0, cohort = 0, local_steps = 0, batch = 0, max_rounds = 0, seeds = 0, contract_rounds = 0;
  double eps = 0.0, kappa = 0.0;
  std::uint64_t seed = 0;
  bool conservative = false, no_wall_time = false, parallel = false;
  std::vector<std::size_t> k_list, c_list;
  int threads = 0;

  app.add_option("--config", config_path, "JSON file with any of the options below (flags override it)");
  auto* o_data = app.add_option("--data", data, "LibSVM file");
  auto* o_syn = app.add_option("--synthetic", synthetic, "quadratic:d=10,kappa=100 or logistic:d=20,n=40,kappa=1000");
  auto* o_clients = app.add_option("--clients", clients, "number of clients M");
  auto* o_cohort = app.add_option("--cohort", cohort, "cohort size C");
  auto* o_method = app.add_option("--method", method, "5gcs, 5gcs0, 5gcsinf, gd, localgd, scaffold, proxskip")
                       ->check(CLI::IsMember({"5gcs", "5gcs0", "5gcsinf", "gd", "localgd", "scaffold", "proxskip"}));
  auto* o_schedule = app.add_option("--schedule", schedule, "thm1, thm2, thm3, thm5 or thm6:<alpha>");
  auto* o_solver = app.add_option("--local-solver", local_solver, "gd, lsvrg or prox")
                       ->check(CLI::IsMember({"gd", "lsvrg", "prox"}));
  auto* o_steps = app.add_option("--local-steps", local_steps, "local steps K (overrides the schedule)");
  auto* o_eps = app.add_option("--eps", eps, "target: psi^T <= eps psi^0");
  auto* o_seed = app.add_option("--seed", seed, "experiment seed");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_mode = app.add_option("--mode", mode, "run, sweep-k, sweep-c or contract-test")
                     ->check(CLI::IsMember({"run", "sweep-k", "sweep-c", "contract-test"}));
  auto* o_conservative = app.add_flag("--conservative", conservative, "local GD stepsize from the global L_F");
  auto* o_init = app.add_option("--init-u", init_u, "initial duals: grad or zero")
                     ->check(CLI::IsMember({"grad", "zero"}));
  auto* o_kappa = app.add_option("--kappa", kappa, "condition number for --data (lambda = L_data/(kappa-1))");
  auto* o_rounds = app.add_option("--max-rounds", max_rounds, "round cap");
  auto* o_batch = app.add_option("--batch", batch, "L-SVRG minibatch size");
  auto* o_klist = app.add_option("--k-list", k_list, "K values for sweep-k")->delimiter(',');
  auto* o_clist = app.add_option("--c-list", c_list, "C values for sweep-c")->delimiter(',');
  auto* o_seeds = app.add_option("--seeds", seeds, "seeds per sweep point");
  auto* o_crounds = app.add_option("--contract-rounds", contract_rounds, "rounds checked by contract-test");
  app.add_flag("--no-wall-time", no_wall_time, "write ms = 0 so traces are byte-reproducible");
  app.add_flag("--parallel", parallel, "solve cohort clients with OpenMP");
  auto* o_threads = app.add_option("--threads", threads, "OpenMP threads (with --parallel)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw fivegcs::ConfigError("cannot open config '" + config_path + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw fivegcs::ConfigError(std::string("config file: ") + e.what());
      }
      cfg = fivegcs::config_from_json(j, cfg);
    }
    if (*o_data) cfg.data = data;
    if (*o_syn) cfg.synthetic = synthetic;
    if (*o_clients) cfg.clients = clients;
    if (*o_cohort) cfg.cohort = cohort;
    if (*o_method) cfg.method = method;
    if (*o_schedule) cfg.schedule = schedule;
    if (*o_solver) cfg.local_solver = local_solver;
    if (*o_steps) cfg.local_steps = local_steps;
    if (*o_eps) cfg.eps = eps;
    if (*o_seed) cfg.seed = seed;
    if (*o_out) cfg.out = out;
    if (*o_mode) cfg.mode = mode;
    if (*o_conservative) cfg.conservative = conservative;
    if (*o_init) cfg.init_u = init_u;
    if (*o_kappa) cfg.kappa = kappa;
    if (*o_rounds) cfg.max_rounds = max_rounds;
    if (*o_batch) cfg.batch = batch;
    if (*o_klist) cfg.k_list = k_list;
    if (*o_clist) cfg.c_list = c_list;
    if (*o_seeds) cfg.seeds = seeds;
    if (*o_crounds) cfg.contract_rounds = contract_rounds;
    if (no_wall_time) cfg.wall_time = false;
    if (parallel) cfg.parallel = true;
#ifdef _OPENMP
    if (*o_threads && threads > 0) omp_set_num_threads(threads);
#else
    (void)o_threads;
#endif
    return fivegcs::run_experiment(cfg, std::cerr);
  } catch (const fivegcs::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
