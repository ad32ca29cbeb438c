#include "d4orm/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "d4orm/denoiser.hpp"
#include "d4orm/parallel.hpp"
#include "d4orm/reward.hpp"
#include "d4orm/rng.hpp"
#include "d4orm/scenario.hpp"

namespace d4orm {

namespace {

void check_problem(const Scenario& scenario, const DynamicsModel& model, int horizon, double dt,
                   int batch, const char* what) {
  validate_scenario(scenario);
  if (scenario.model_kind != model.kind) {
    throw std::invalid_argument(std::string(what) + ": scenario model kind mismatch");
  }
  if (horizon < 2) throw std::invalid_argument(std::string(what) + ": horizon must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument(std::string(what) + ": dt must be positive");
  if (batch < 2) throw std::invalid_argument(std::string(what) + ": batch must be >= 2");
}

Vector evaluate_batch(const std::vector<JointControls>& samples, const Scenario& scenario,
                      const DynamicsModel& model, double dt, int workers) {
  Vector rewards(static_cast<Eigen::Index>(samples.size()));
  parallel_for(static_cast<int>(samples.size()), workers, [&](int m) {
    const JointTrajectory traj = rollout(model, scenario.starts, samples[m], dt);
    rewards[m] = total_reward(traj, scenario, scenario.reward);
  });
  return rewards;
}

// Shared anytime loop: `update(iteration)` advances the solver's mean control
// and returns it for evaluation.
template <class Update>
SolveResult run_anytime(const Scenario& scenario, const DynamicsModel& model, int iterations,
                        const std::optional<double>& deadline, bool stop_on_success, double dt,
                        Update&& update) {
  const auto start_time = std::chrono::steady_clock::now();
  const auto elapsed = [&start_time] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  };

  SolveResult result;
  int best_iteration = -1;
  for (int iteration = 1; iteration <= iterations; ++iteration) {
    const JointControls& mean = update(iteration);
    const JointTrajectory traj = rollout(model, scenario.starts, mean, dt);
    const double reward = total_reward(traj, scenario);
    const double quality = objective(traj, scenario);
    const SuccessReport report = check_success(traj, scenario);
    result.per_iteration.push_back({reward, quality, report.success, elapsed()});

    if (best_iteration < 0 || reward > result.best_reward) {
      result.best_reward = reward;
      result.best_trajectory = traj;
      best_iteration = iteration;
    }
    if (stop_on_success && report.success) break;
    if (deadline && elapsed() >= *deadline) break;
  }

  result.iterations_used = static_cast<int>(result.per_iteration.size());
  result.total_denoise_steps = result.iterations_used;
  result.success = check_success(result.best_trajectory, scenario).success;
  result.wall_time = elapsed();
  return result;
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t stream_seed) {
  Matrix z(rows, cols);
  NormalStream stream(stream_seed);
  stream.fill(z.data(), z.size());
  return z;
}

}  // namespace

std::vector<int> select_elites(const Vector& rewards, int count) {
  if (count < 1 || count > rewards.size()) {
    throw std::invalid_argument("select_elites: elite count out of range");
  }
  std::vector<int> order(static_cast<std::size_t>(rewards.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&rewards](int a, int b) { return rewards[a] > rewards[b]; });
  order.resize(static_cast<std::size_t>(count));
  std::sort(order.begin(), order.end());
  return order;
}

SolveResult mppi_solve(const Scenario& scenario, const DynamicsModel& model,
                       const MppiConfig& config) {
  check_problem(scenario, model, config.horizon, config.dt, config.batch, "mppi_solve");
  if (!(config.sigma > 0.0)) throw std::invalid_argument("mppi_solve: sigma must be positive");
  if (config.iterations < 1) throw std::invalid_argument("mppi_solve: iterations must be >= 1");

  JointControls mean = JointControls::zeros(scenario.robots, model.control_dim, config.horizon);
  std::vector<JointControls> samples(static_cast<std::size_t>(config.batch));

  return run_anytime(
      scenario, model, config.iterations, config.deadline_seconds, config.stop_on_success,
      config.dt, [&](int iteration) -> const JointControls& {
        parallel_for(config.batch, config.workers, [&](int m) {
          const Matrix z =
              normal_matrix(mean.u.rows(), mean.u.cols(),
                            mix_seed(config.seed, static_cast<std::uint64_t>(iteration),
                                     static_cast<std::uint64_t>(m)));
          samples[m] = {mean.robots, mean.control_dim, mean.u + config.sigma * z};
        });
        const Vector rewards =
            evaluate_batch(samples, scenario, model, config.dt, config.workers);
        const Vector weights = score_weights(rewards, config.lambda);
        mean = mc_average(samples, weights);
        return mean;
      });
}

SolveResult cem_solve(const Scenario& scenario, const DynamicsModel& model,
                      const CemConfig& config) {
  check_problem(scenario, model, config.horizon, config.dt, config.batch, "cem_solve");
  if (!(config.elite_fraction > 0.0) || !(config.elite_fraction < 1.0)) {
    throw std::invalid_argument("cem_solve: elite_fraction must lie in (0, 1)");
  }
  const int elite_count = static_cast<int>(config.elite_fraction * config.batch);
  if (elite_count < 1) {
    throw std::invalid_argument("cem_solve: elite_fraction * batch must be >= 1");
  }
  if (!(config.initial_std > 0.0) || !(config.min_std > 0.0)) {
    throw std::invalid_argument("cem_solve: stds must be positive");
  }
  if (config.iterations < 1) throw std::invalid_argument("cem_solve: iterations must be >= 1");

  JointControls mean = JointControls::zeros(scenario.robots, model.control_dim, config.horizon);
  Matrix std_dev = Matrix::Constant(mean.u.rows(), mean.u.cols(), config.initial_std);
  std::vector<JointControls> samples(static_cast<std::size_t>(config.batch));

  return run_anytime(
      scenario, model, config.iterations, config.deadline_seconds, config.stop_on_success,
      config.dt, [&](int iteration) -> const JointControls& {
        parallel_for(config.batch, config.workers, [&](int m) {
          const Matrix z =
              normal_matrix(mean.u.rows(), mean.u.cols(),
                            mix_seed(config.seed, static_cast<std::uint64_t>(iteration),
                                     static_cast<std::uint64_t>(m)));
          samples[m] = {mean.robots, mean.control_dim, mean.u + std_dev.cwiseProduct(z)};
        });
        const Vector rewards =
            evaluate_batch(samples, scenario, model, config.dt, config.workers);
        const std::vector<int> elites = select_elites(rewards, elite_count);

        Matrix new_mean = Matrix::Zero(mean.u.rows(), mean.u.cols());
        for (const int m : elites) new_mean += samples[static_cast<std::size_t>(m)].u;
        new_mean /= static_cast<double>(elite_count);

        Matrix variance = Matrix::Zero(mean.u.rows(), mean.u.cols());
        for (const int m : elites) {
          const Matrix d = samples[static_cast<std::size_t>(m)].u - new_mean;
          variance += d.cwiseProduct(d);
        }
        variance /= static_cast<double>(elite_count);
        std_dev = variance.cwiseSqrt().cwiseMax(config.min_std);
        mean.u = new_mean;
        return mean;
      });
}

}  // namespace d4orm
