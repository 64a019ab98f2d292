#pragma once

#include "fivegcs/algorithms.hpp"
#include "fivegcs/objective.hpp"
#include "fivegcs/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <string>

namespace fivegcs {

enum class BaselineMethod { gd, localgd, scaffold, proxskip };

BaselineMethod parse_baseline(const std::string& name);
std::string to_string(BaselineMethod method);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::gd;
  /// Server GD stepsize, local stepsize (LocalGD/Scaffold) or ProxSkip gamma.
  double stepsize = 0.0;
  std::size_t local_steps = 1;
  std::size_t cohort = 1;
  /// ProxSkip communication probability.
  double probability = 1.0;
};

/// gd: 1/L. localgd/scaffold: K = ceil(sqrt(kappa)) steps of 1/(6 L K).
/// proxskip: gamma = 1/L, p = 1/sqrt(kappa).
BaselineConfig default_baseline(const Problem& problem, BaselineMethod method, std::size_t cohort);

/// Traces use psi = |x - x*|^2 so that eps refers to the relative distance.
RunResult run_gd(const Problem& problem, const ReferenceSolution& ref, double stepsize, const RunControl& control);

/// Each cohort client runs K GD steps on f_m from x; the server takes the
/// plain cohort average.
RunResult run_localgd(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                      const RunControl& control, std::uint64_t seed, Execution execution = Execution::serial);

/// Control variates c_m, c = mean_m c_m; local step y -= eta (grad f_m(y) - c_m + c);
/// c_m <- c_m - c + (x - y_K)/(K eta); unit server stepsize.
RunResult run_scaffold(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                       const RunControl& control, std::uint64_t seed, Execution execution = Execution::serial);

/// Local steps x_m <- x_m - gamma (grad f_m(x_m) - h_m) until a Bernoulli(p)
/// coin fires; then the cohort averages x_m - (gamma/p) h_m and updates
/// h_m += (p/gamma)(x - x_m). Non-cohort clients are frozen. One trace row
/// per communication.
RunResult run_proxskip(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                       const RunControl& control, std::uint64_t seed);

RunResult run_baseline(const Problem& problem, const ReferenceSolution& ref, const BaselineConfig& config,
                       const RunControl& control, std::uint64_t seed, Execution execution = Execution::serial);

}  // namespace fivegcs
