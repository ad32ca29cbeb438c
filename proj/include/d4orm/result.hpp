#pragma once

#include <vector>

#include "d4orm/denoiser.hpp"
#include "d4orm/dynamics.hpp"

namespace d4orm {

struct IterationStats {
  double reward;         // team reward of this iteration's trajectory
  double objective;      // goal-occupancy objective of the same trajectory
  bool success;          // check_success at this iteration
  double wall_seconds;   // elapsed since the solve started
};

/// Common result shape for all solvers. `per_iteration` holds one record per
/// completed iteration; the returned trajectory is the best-reward iterate
/// ever seen, which need not be the last.
struct SolveResult {
  JointTrajectory best_trajectory;
  double best_reward{0.0};
  bool success{false};  // check_success(best_trajectory)
  int iterations_used{0};
  long long total_denoise_steps{0};  // iterations * N for the denoiser, iterations otherwise
  double wall_time{0.0};
  std::vector<IterationStats> per_iteration;
  std::vector<DenoiseTrace> traces;  // denoiser only; one trace per iteration
};

}  // namespace d4orm
