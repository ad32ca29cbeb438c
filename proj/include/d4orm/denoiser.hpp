#pragma once

#include <cstdint>
#include <vector>

#include "d4orm/dynamics.hpp"
#include "d4orm/schedule.hpp"
#include "d4orm/types.hpp"

namespace d4orm {

struct Scenario;

enum class DenoiseMode {
  FromScratch,  // variable starts as a standard-normal draw, rewards on rollout(sample)
  Deformation   // variable starts at zero, rewards on rollout(base + sample)
};

struct DenoiserConfig {
  int steps{100};                 // N denoising steps
  int batch{2048};                // M rollouts per step
  double lambda{0.1};             // softmax temperature on z-scored rewards
  double alpha_bar_final{0.05};   // terminal alpha_bar of the schedule
  std::uint64_t seed{0};
  DenoiseMode mode{DenoiseMode::Deformation};
  int workers{0};                 // 0 = hardware concurrency
};

struct DenoiseStepRecord {
  int step;               // denoising index i, counting down N..1
  double best_reward;     // max sampled reward at this step
  double mean_reward;     // batch mean reward
  double weight_entropy;  // -sum w log w of the softmax weights
};

struct DenoiseTrace {
  std::vector<DenoiseStepRecord> steps;
};

/// M samples around `current` at noise level i: sample = current / sqrt(ab_i)
/// + sqrt(1/ab_i - 1) * z. Each sample draws from its own stream keyed by
/// (seed, i, sample index), so the batch is reproducible and independent of
/// generation order.
std::vector<JointControls> sample_batch(const JointControls& current,
                                        const NoiseSchedule& schedule, int i, int batch,
                                        std::uint64_t seed, int workers = 0);

/// Softmax weights over batch rewards: rewards are z-scored within the batch
/// (population std; a batch with std below 1e-8 yields uniform weights), then
/// exponentiated at temperature lambda and normalized to sum 1.
Vector score_weights(const Vector& rewards, double lambda);

/// Weighted elementwise average, accumulated in ascending sample order.
JointControls mc_average(const std::vector<JointControls>& samples, const Vector& weights);

/// One-step update: sqrt(alpha_bar_{i-1}) * averaged. At i = 1 this is the
/// identity since alpha_bar_0 = 1.
JointControls denoise_step(const JointControls& averaged, const NoiseSchedule& schedule, int i);

struct DenoiseResult {
  JointControls variable;  // the denoised control trajectory or deformation
  DenoiseTrace trace;
};

/// Full denoising pass i = N..1 over a control-space variable. In Deformation
/// mode the variable is a correction added to `base` before every rollout; in
/// FromScratch mode `base` only fixes the shape. `dt` is the rollout step.
DenoiseResult run_denoising(const JointControls& base, const Scenario& scenario,
                            const DynamicsModel& model, const NoiseSchedule& schedule,
                            const DenoiserConfig& config, double dt);

}  // namespace d4orm
