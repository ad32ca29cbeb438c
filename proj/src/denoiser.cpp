#include "d4orm/denoiser.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "d4orm/parallel.hpp"
#include "d4orm/reward.hpp"
#include "d4orm/rng.hpp"
#include "d4orm/scenario.hpp"

namespace d4orm {

namespace {

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t stream_seed) {
  Matrix z(rows, cols);
  NormalStream stream(stream_seed);
  stream.fill(z.data(), z.size());  // column-major fill order
  return z;
}

double weight_entropy(const Vector& weights) {
  double h = 0.0;
  for (Eigen::Index m = 0; m < weights.size(); ++m) {
    if (weights[m] > 0.0) h -= weights[m] * std::log(weights[m]);
  }
  return h;
}

}  // namespace

std::vector<JointControls> sample_batch(const JointControls& current,
                                        const NoiseSchedule& schedule, int i, int batch,
                                        std::uint64_t seed, int workers) {
  if (batch < 1) throw std::invalid_argument("sample_batch: batch must be >= 1");
  const SamplingSpread spread = sampling_spread(schedule, i);
  std::vector<JointControls> samples(static_cast<std::size_t>(batch));
  parallel_for(batch, workers, [&](int m) {
    const Matrix z = normal_matrix(current.u.rows(), current.u.cols(),
                                   mix_seed(seed, static_cast<std::uint64_t>(i),
                                            static_cast<std::uint64_t>(m)));
    samples[m] = {current.robots, current.control_dim,
                  spread.mean_scale * current.u + spread.std * z};
  });
  return samples;
}

Vector score_weights(const Vector& rewards, double lambda) {
  const Eigen::Index m = rewards.size();
  if (m < 2) throw std::invalid_argument("score_weights: need at least 2 rewards");
  if (!(lambda > 0.0)) throw std::invalid_argument("score_weights: lambda must be positive");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!std::isfinite(rewards[j])) {
      throw std::runtime_error("score_weights: non-finite reward for sample " +
                               std::to_string(j));
    }
  }

  // Plain sequential reductions keep the result reproducible against a naive
  // reimplementation.
  double mean = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) mean += rewards[j];
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double d = rewards[j] - mean;
    var += d * d;
  }
  const double std_dev = std::sqrt(var / static_cast<double>(m));

  Vector weights(m);
  if (std_dev < 1e-8) {
    weights.setConstant(1.0 / static_cast<double>(m));
    return weights;
  }
  double max_scaled = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m; ++j) {
    weights[j] = (rewards[j] - mean) / std_dev / lambda;
    max_scaled = std::max(max_scaled, weights[j]);
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    weights[j] = std::exp(weights[j] - max_scaled);
    sum += weights[j];
  }
  for (Eigen::Index j = 0; j < m; ++j) weights[j] /= sum;
  return weights;
}

JointControls mc_average(const std::vector<JointControls>& samples, const Vector& weights) {
  if (samples.empty()) throw std::invalid_argument("mc_average: empty sample set");
  if (static_cast<Eigen::Index>(samples.size()) != weights.size()) {
    throw std::invalid_argument("mc_average: weight count does not match sample count");
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < weights.size(); ++j) sum += weights[j];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("mc_average: weights must sum to 1");
  }
  JointControls out{samples[0].robots, samples[0].control_dim,
                    Matrix::Zero(samples[0].u.rows(), samples[0].u.cols())};
  for (std::size_t m = 0; m < samples.size(); ++m) {
    out.u += weights[static_cast<Eigen::Index>(m)] * samples[m].u;
  }
  return out;
}

JointControls denoise_step(const JointControls& averaged, const NoiseSchedule& schedule, int i) {
  if (i < 1 || i > schedule.steps()) {
    throw std::invalid_argument("denoise_step: step index " + std::to_string(i) +
                                " outside 1.." + std::to_string(schedule.steps()));
  }
  const double scale = std::sqrt(schedule.alpha_bar[i - 1]);
  return {averaged.robots, averaged.control_dim, scale * averaged.u};
}

DenoiseResult run_denoising(const JointControls& base, const Scenario& scenario,
                            const DynamicsModel& model, const NoiseSchedule& schedule,
                            const DenoiserConfig& config, double dt) {
  if (config.batch < 2) throw std::invalid_argument("run_denoising: batch must be >= 2");
  if (!(config.lambda > 0.0)) throw std::invalid_argument("run_denoising: lambda must be > 0");
  if (config.steps != schedule.steps()) {
    throw std::invalid_argument("run_denoising: config.steps (" + std::to_string(config.steps) +
                                ") does not match the schedule (" +
                                std::to_string(schedule.steps()) + ")");
  }
  if (base.robots != scenario.robots) {
    throw std::invalid_argument("run_denoising: base has " + std::to_string(base.robots) +
                                " robots, scenario " + std::to_string(scenario.robots));
  }
  if (base.control_dim != model.control_dim) {
    throw std::invalid_argument("run_denoising: control dimension mismatch");
  }

  const bool deform = config.mode == DenoiseMode::Deformation;
  JointControls variable;
  if (deform) {
    variable = JointControls::zeros(base.robots, base.control_dim, base.horizon());
  } else {
    // Step index 0 is never used for sampling, so (seed, 0, 0) is free for
    // the initial draw.
    variable = {base.robots, base.control_dim,
                normal_matrix(base.u.rows(), base.u.cols(), mix_seed(config.seed, 0, 0))};
  }

  DenoiseResult result;
  result.trace.steps.reserve(static_cast<std::size_t>(schedule.steps()));
  Vector rewards(config.batch);

  for (int i = schedule.steps(); i >= 1; --i) {
    const std::vector<JointControls> samples =
        sample_batch(variable, schedule, i, config.batch, config.seed, config.workers);

    parallel_for(config.batch, config.workers, [&](int m) {
      try {
        JointControls candidate{base.robots, base.control_dim,
                                deform ? Matrix(base.u + samples[m].u) : samples[m].u};
        const JointTrajectory traj = rollout(model, scenario.starts, candidate, dt);
        rewards[m] = total_reward(traj, scenario, scenario.reward);
      } catch (const std::exception& e) {
        throw std::runtime_error("run_denoising: sample " + std::to_string(m) + " at step " +
                                 std::to_string(i) + ": " + e.what());
      }
    });

    const Vector weights = score_weights(rewards, config.lambda);
    const JointControls averaged = mc_average(samples, weights);
    variable = denoise_step(averaged, schedule, i);

    double best = rewards[0];
    double mean = 0.0;
    for (Eigen::Index m = 0; m < rewards.size(); ++m) {
      best = std::max(best, rewards[m]);
      mean += rewards[m];
    }
    mean /= static_cast<double>(rewards.size());
    result.trace.steps.push_back({i, best, mean, weight_entropy(weights)});
  }

  result.variable = std::move(variable);
  return result;
}

}  // namespace d4orm
