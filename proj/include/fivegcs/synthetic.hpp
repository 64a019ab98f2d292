#pragma once

#include "fivegcs/data_io.hpp"
#include "fivegcs/objective.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fivegcs {

enum class SyntheticKind { quadratic, logistic };

/// Parsed form of `<kind>:key=value,...`, e.g. `quadratic:d=10,kappa=100` or
/// `logistic:d=20,n=40,kappa=1000,shift=1,seed=7`.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::quadratic;
  std::size_t dimension = 10;
  /// Points per client (logistic only).
  std::size_t points = 40;
  /// Exact condition number L / mu of the generated problem.
  double kappa = 100.0;
  /// Client heterogeneity: spread of the per-client optima.
  double shift = 1.0;
  std::uint64_t seed = 1;

  /// Canonical text form; parse_synthetic(canonical()) round-trips.
  std::string canonical() const;
};

SyntheticSpec parse_synthetic(const std::string& text);

/// Quadratic clients l_m = (1/2) x^T Q_m x - q_m^T x with random eigenbases;
/// client 0 has lambda_max(Q_0) = 1 and the others a random fraction of it,
/// so L_data = 1 and lambda = 1/(kappa - 1).
Problem make_quadratic_problem(const SyntheticSpec& spec, std::size_t clients);

/// Dense Gaussian features with a per-client mean offset and per-client
/// labeling direction, returned as LibSVM rows (`points` per client).
ParsedData make_logistic_data(const SyntheticSpec& spec, std::size_t clients);

/// Logistic problem over make_logistic_data with lambda set for spec.kappa.
Problem make_logistic_problem(const SyntheticSpec& spec, std::size_t clients);

Problem make_synthetic_problem(const SyntheticSpec& spec, std::size_t clients);

/// Logistic problem over given shards with lambda = L_data / (kappa - 1).
Problem logistic_with_condition(std::vector<ClientShard> shards, double kappa);

}  // namespace fivegcs
