#pragma once

#include "fivegcs/types.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fivegcs {

/// MT19937-64 with hand-written range reductions, so a seed yields the same
/// stream on every platform and standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }
  /// Uniform on [0, n), unbiased by rejection.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return p >= 1.0 || uniform01() < p; }
  /// Standard normal via Box-Muller on uniform01.
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed of the cohort draw in round t: seed xor t.
inline std::uint64_t round_seed(std::uint64_t seed, std::uint64_t round) { return seed ^ round; }
/// Seed of a stochastic local solver for client m in round t.
std::uint64_t solver_seed(std::uint64_t seed, std::uint64_t round, std::size_t client);

/// Sorted client ids of one round's participants.
struct Cohort {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  bool contains(std::size_t m) const;
  friend bool operator==(const Cohort&, const Cohort&) = default;
};

/// Uniform C-subset of {0..M-1} by partial Fisher-Yates. Throws ConfigError
/// unless 1 <= C <= M.
Cohort sample_cohort(std::size_t clients, std::size_t cohort_size, SeededRng& rng);

/// All binom(M, C) cohorts in lexicographic order.
std::vector<Cohort> enumerate_cohorts(std::size_t clients, std::size_t cohort_size);

/// P(v)_m = (M/C) v_m for m in the cohort, 0 otherwise.
BlockVector apply_sampling_operator(const BlockVector& v, const Cohort& cohort);

/// Closed form of E|H^T(P(v) - v)|^2 over uniform cohorts of size C:
/// (M/C)((M-C)/(M-1)) sum|v_m|^2 - ((M-C)/(C(M-1))) |sum v_m|^2. Zero for M = 1.
double expected_sq_deviation(const BlockVector& v, std::size_t cohort_size);

}  // namespace fivegcs
