#pragma once

#include <optional>

#include "d4orm/denoiser.hpp"
#include "d4orm/result.hpp"
#include "d4orm/schedule.hpp"

namespace d4orm {

struct Scenario;

struct OptimizerConfig {
  int max_iterations{10};
  std::optional<double> deadline_seconds{};  // checked between iterations
  bool stop_on_success{true};
  DenoiserConfig denoiser{};
  int horizon{100};
  double dt{0.1};
};

/// One deformation update: denoise a correction against the base trajectory's
/// executed controls and roll out base + correction. Uses config.denoiser.seed
/// as-is; solve() derives a fresh seed per iteration.
JointTrajectory iterate(const JointTrajectory& base, const Scenario& scenario,
                        const DynamicsModel& model, const NoiseSchedule& schedule,
                        const OptimizerConfig& config);

/// Anytime loop: start from the all-zero-control rollout and keep applying
/// denoised deformations until success (when stop_on_success), the deadline,
/// or the iteration cap. Deterministic in (seed, config, scenario).
SolveResult solve(const Scenario& scenario, const DynamicsModel& model,
                  const OptimizerConfig& config);

}  // namespace d4orm
