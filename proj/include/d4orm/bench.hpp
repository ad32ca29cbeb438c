#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "d4orm/baselines.hpp"
#include "d4orm/optimizer.hpp"
#include "d4orm/scenario.hpp"

namespace d4orm {

/// Which solver a trial runs, plus its full configuration. The per-trial seed
/// overrides the seed embedded in the chosen config.
struct SolverSpec {
  std::string name{"d4orm"};  // d4orm | mppi | cem
  OptimizerConfig d4orm{};
  MppiConfig mppi{};
  CemConfig cem{};
};

struct IterationRecord {
  int iteration;                  // 1-based
  long long cumulative_steps;     // iterations * N for d4orm, iterations otherwise
  long long cumulative_rollouts;  // cumulative_steps * M
  double reward;
  double best_reward;  // running max of reward
  double objective;
  bool success;
  double wall_seconds;  // elapsed since the solve started
};

struct TrialRecord {
  std::string solver_id;
  std::string scenario_id;
  std::uint64_t seed{0};
  std::vector<IterationRecord> iterations;
  std::optional<long long> first_success_step;
  std::optional<long long> first_success_rollouts;
  std::optional<double> first_success_time;
  std::string error;  // non-empty when the solver failed outright
};

struct RuntimeStats {
  int count{0};  // successful trials
  double mean{0.0};
  double median{0.0};
  double iqr{0.0};
};

struct CurvePoint {
  long long steps;
  long long rollouts;
  int count;  // trials contributing at this step
  double reward_mean;
  double reward_std;
  double objective_mean;
  double objective_std;
};

struct Aggregate {
  std::string solver_id;
  std::string scenario_id;
  int trials{0};
  int successes{0};
  double success_rate{0.0};
  std::optional<RuntimeStats> runtime;  // absent when no trial succeeded
  std::vector<CurvePoint> curve;
};

/// Runs one solver on one scenario with per-iteration instrumentation.
/// Solver exceptions become a failed record, not a thrown error.
TrialRecord run_trial(const SolverSpec& spec, const Scenario& scenario, std::uint64_t seed);

/// Groups records by (solver, scenario) and folds each group into success
/// rate, runtime stats over successful trials, and reward-vs-steps curves.
/// The fold is invariant to the input order.
std::vector<Aggregate> aggregate(const std::vector<TrialRecord>& records);

/// Success-rate matrix over a (denoising steps x iterations) grid, rows
/// indexed by the iteration axis. `base` supplies every other parameter.
Matrix sensitivity_grid(const Scenario& scenario, const std::vector<int>& step_counts,
                        const std::vector<int>& iteration_counts,
                        const std::vector<std::uint64_t>& seeds, const OptimizerConfig& base);

/// CSV with one row per iteration; the header is fixed:
/// solver,scenario,seed,iteration,cumulative_steps,cumulative_rollouts,
/// reward,best_reward,objective,success,wall_seconds
void write_trial_csv(const TrialRecord& record, const std::string& path);
TrialRecord read_trial_csv(const std::string& path);

nlohmann::json aggregate_to_json(const std::vector<Aggregate>& aggregates);

}  // namespace d4orm
