#pragma once

#include "fivegcs/types.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace fivegcs {

/// One row of `round,psi,dist_sq,subopt,uploads,ms`. For baselines psi is
/// |x - x*|^2, the same quantity as dist_sq.
struct TraceRecord {
  std::size_t round = 0;
  double psi = 0.0;
  double dist_sq = 0.0;
  double subopt = 0.0;
  std::uint64_t uploads = 0;
  double ms = 0.0;
};

struct RunControl {
  double eps = 1e-6;
  std::size_t max_rounds = 100000;
  /// Stop at the first round with psi <= eps * psi^0.
  bool stop_at_eps = true;
  /// When false the ms column is written as 0 so traces are byte-stable.
  bool wall_time = true;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  /// First round t with psi^t <= eps psi^0, if reached.
  std::optional<std::size_t> rounds_to_eps;
  Vector x_final;
};

/// Accumulates trace rows and the eps-stopping decision.
class TraceRecorder {
 public:
  explicit TraceRecorder(const RunControl& control)
      : control_(control), start_(std::chrono::steady_clock::now()) {}

  /// Returns true when the run should stop.
  bool record(std::size_t round, double psi, double dist_sq, double subopt, std::uint64_t uploads) {
    TraceRecord r{round, psi, dist_sq, subopt, uploads, 0.0};
    if (control_.wall_time) {
      r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }
    if (result_.trace.empty()) psi0_ = psi;
    result_.trace.push_back(r);
    if (!result_.rounds_to_eps && psi <= control_.eps * psi0_) result_.rounds_to_eps = round;
    if (control_.stop_at_eps && result_.rounds_to_eps) return true;
    return round >= control_.max_rounds;
  }

  RunResult finish(Vector x_final) {
    result_.x_final = std::move(x_final);
    return std::move(result_);
  }

 private:
  RunControl control_;
  std::chrono::steady_clock::time_point start_;
  double psi0_ = 0.0;
  RunResult result_;
};

}  // namespace fivegcs
