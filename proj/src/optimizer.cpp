#include "d4orm/optimizer.hpp"

#include <chrono>
#include <stdexcept>

#include "d4orm/reward.hpp"
#include "d4orm/rng.hpp"
#include "d4orm/scenario.hpp"

namespace d4orm {

namespace {

struct IterateOutcome {
  JointTrajectory trajectory;
  DenoiseTrace trace;
};

IterateOutcome iterate_impl(const JointTrajectory& base, const Scenario& scenario,
                            const DynamicsModel& model, const NoiseSchedule& schedule,
                            const DenoiserConfig& denoiser_config, double dt) {
  DenoiserConfig cfg = denoiser_config;
  cfg.mode = DenoiseMode::Deformation;
  const JointControls base_controls = base.executed_controls();
  DenoiseResult denoised = run_denoising(base_controls, scenario, model, schedule, cfg, dt);
  const JointControls updated{base_controls.robots, base_controls.control_dim,
                              base_controls.u + denoised.variable.u};
  return {rollout(model, scenario.starts, updated, dt), std::move(denoised.trace)};
}

void check_model(const Scenario& scenario, const DynamicsModel& model) {
  if (scenario.model_kind != model.kind) {
    throw std::invalid_argument("solve: scenario model kind does not match the dynamics model");
  }
  if (scenario.starts.rows() != model.state_dim) {
    throw std::invalid_argument("solve: scenario state dimension does not match the model");
  }
}

}  // namespace

JointTrajectory iterate(const JointTrajectory& base, const Scenario& scenario,
                        const DynamicsModel& model, const NoiseSchedule& schedule,
                        const OptimizerConfig& config) {
  return iterate_impl(base, scenario, model, schedule, config.denoiser, base.dt).trajectory;
}

SolveResult solve(const Scenario& scenario, const DynamicsModel& model,
                  const OptimizerConfig& config) {
  if (config.max_iterations < 1) {
    throw std::invalid_argument("solve: max_iterations must be >= 1");
  }
  if (config.horizon < 2) throw std::invalid_argument("solve: horizon must be >= 2");
  if (!(config.dt > 0.0)) throw std::invalid_argument("solve: dt must be positive");
  validate_scenario(scenario);
  check_model(scenario, model);

  const NoiseSchedule schedule =
      make_schedule(config.denoiser.steps, config.denoiser.alpha_bar_final);

  const auto start_time = std::chrono::steady_clock::now();
  const auto elapsed = [&start_time] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  };

  JointTrajectory current = rollout(
      model, scenario.starts,
      JointControls::zeros(scenario.robots, model.control_dim, config.horizon), config.dt);

  SolveResult result;
  int best_iteration = -1;
  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    DenoiserConfig denoiser_config = config.denoiser;
    // Fresh noise realizations each iteration; the schedule itself restarts
    // from step N implicitly.
    denoiser_config.seed = mix_seed(config.denoiser.seed, static_cast<std::uint64_t>(iteration));
    IterateOutcome outcome =
        iterate_impl(current, scenario, model, schedule, denoiser_config, config.dt);
    current = std::move(outcome.trajectory);

    const double reward = total_reward(current, scenario);
    const double quality = objective(current, scenario);
    const SuccessReport report = check_success(current, scenario);
    result.per_iteration.push_back({reward, quality, report.success, elapsed()});
    result.traces.push_back(std::move(outcome.trace));

    if (best_iteration < 0 || reward > result.best_reward) {
      result.best_reward = reward;
      result.best_trajectory = current;
      best_iteration = iteration;
    }
    if (config.stop_on_success && report.success) break;
    if (config.deadline_seconds && elapsed() >= *config.deadline_seconds) break;
  }

  result.iterations_used = static_cast<int>(result.per_iteration.size());
  result.total_denoise_steps =
      static_cast<long long>(result.iterations_used) * config.denoiser.steps;
  result.success = check_success(result.best_trajectory, scenario).success;
  result.wall_time = elapsed();
  return result;
}

}  // namespace d4orm
