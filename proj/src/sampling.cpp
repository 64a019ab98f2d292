#include "fivegcs/sampling.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace fivegcs {

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Largest multiple of n representable; draws at or above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % n;
}

double SeededRng::normal() {
  double u1;
  do {
    u1 = uniform01();
  } while (u1 == 0.0);
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t solver_seed(std::uint64_t seed, std::uint64_t round, std::size_t client) {
  return mix_seed(mix_seed(seed ^ 0x5f3759df5f3759dfULL) ^ mix_seed(round) ^ (static_cast<std::uint64_t>(client) + 1) * 0x9e3779b97f4a7c15ULL);
}

bool Cohort::contains(std::size_t m) const { return std::binary_search(indices.begin(), indices.end(), m); }

Cohort sample_cohort(std::size_t clients, std::size_t cohort_size, SeededRng& rng) {
  if (cohort_size < 1 || cohort_size > clients) {
    throw ConfigError("cohort size " + std::to_string(cohort_size) + " outside [1, " + std::to_string(clients) + "]");
  }
  std::vector<std::size_t> ids(clients);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  if (cohort_size < clients) {
    for (std::size_t i = 0; i < cohort_size; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_index(clients - i));
      std::swap(ids[i], ids[j]);
    }
  }
  ids.resize(cohort_size);
  std::sort(ids.begin(), ids.end());
  return Cohort{std::move(ids)};
}

std::vector<Cohort> enumerate_cohorts(std::size_t clients, std::size_t cohort_size) {
  if (cohort_size < 1 || cohort_size > clients) throw ConfigError("enumerate_cohorts: invalid cohort size");
  std::vector<Cohort> out;
  std::vector<std::size_t> idx(cohort_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    out.push_back(Cohort{idx});
    // Advance to the next combination in lexicographic order.
    std::size_t i = cohort_size;
    while (i > 0 && idx[i - 1] == clients - cohort_size + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < cohort_size; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

BlockVector apply_sampling_operator(const BlockVector& v, const Cohort& cohort) {
  const double scale = static_cast<double>(v.size()) / static_cast<double>(cohort.size());
  BlockVector out;
  out.reserve(v.size());
  for (std::size_t m = 0; m < v.size(); ++m) {
    out.push_back(cohort.contains(m) ? Vector(scale * v[m]) : Vector(Vector::Zero(v[m].size())));
  }
  return out;
}

double expected_sq_deviation(const BlockVector& v, std::size_t cohort_size) {
  const auto M = static_cast<double>(v.size());
  const auto C = static_cast<double>(cohort_size);
  if (cohort_size < 1 || cohort_size > v.size()) throw ConfigError("expected_sq_deviation: invalid cohort size");
  if (v.size() == 1) return 0.0;
  const double sum_sq = squared_norm(v);
  const double sq_sum = block_sum(v, v.front().size()).squaredNorm();
  return (M / C) * ((M - C) / (M - 1.0)) * sum_sq - ((M - C) / (C * (M - 1.0))) * sq_sum;
}

}  // namespace fivegcs
