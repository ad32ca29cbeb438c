#include "d4orm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace d4orm {

namespace {

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct MeanStd {
  double mean{0.0};
  double std{0.0};
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (const double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) {
    const double d = v - out.mean;
    var += d * d;
  }
  out.std = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

}  // namespace

TrialRecord run_trial(const SolverSpec& spec, const Scenario& scenario, std::uint64_t seed) {
  TrialRecord record;
  record.solver_id = spec.name;
  record.scenario_id = scenario.id;
  record.seed = seed;

  SolveResult result;
  long long steps_per_iteration = 1;
  long long rollouts_per_step = 1;
  try {
    if (spec.name == "d4orm") {
      OptimizerConfig cfg = spec.d4orm;
      cfg.denoiser.seed = seed;
      steps_per_iteration = cfg.denoiser.steps;
      rollouts_per_step = cfg.denoiser.batch;
      result = solve(scenario, DynamicsModel::make(scenario.model_kind), cfg);
    } else if (spec.name == "mppi") {
      MppiConfig cfg = spec.mppi;
      cfg.seed = seed;
      rollouts_per_step = cfg.batch;
      result = mppi_solve(scenario, DynamicsModel::make(scenario.model_kind), cfg);
    } else if (spec.name == "cem") {
      CemConfig cfg = spec.cem;
      cfg.seed = seed;
      rollouts_per_step = cfg.batch;
      result = cem_solve(scenario, DynamicsModel::make(scenario.model_kind), cfg);
    } else {
      throw std::invalid_argument("run_trial: unknown solver '" + spec.name + "'");
    }
  } catch (const std::exception& e) {
    record.error = e.what();
    return record;
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < result.per_iteration.size(); ++j) {
    const IterationStats& stats = result.per_iteration[j];
    best = std::max(best, stats.reward);
    const long long iteration = static_cast<long long>(j) + 1;
    const long long steps = iteration * steps_per_iteration;
    IterationRecord row{static_cast<int>(iteration),
                        steps,
                        steps * rollouts_per_step,
                        stats.reward,
                        best,
                        stats.objective,
                        stats.success,
                        stats.wall_seconds};
    record.iterations.push_back(row);
    if (stats.success && !record.first_success_step) {
      record.first_success_step = row.cumulative_steps;
      record.first_success_rollouts = row.cumulative_rollouts;
      record.first_success_time = row.wall_seconds;
    }
  }
  return record;
}

std::vector<Aggregate> aggregate(const std::vector<TrialRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::vector<const TrialRecord*>> groups;
  for (const TrialRecord& record : records) {
    groups[{record.solver_id, record.scenario_id}].push_back(&record);
  }

  std::vector<Aggregate> out;
  for (auto& [key, group] : groups) {
    // Sort by seed so the fold does not depend on input order.
    std::sort(group.begin(), group.end(),
              [](const TrialRecord* a, const TrialRecord* b) { return a->seed < b->seed; });

    Aggregate agg;
    agg.solver_id = key.first;
    agg.scenario_id = key.second;
    agg.trials = static_cast<int>(group.size());

    std::vector<double> runtimes;
    for (const TrialRecord* record : group) {
      if (record->first_success_time) {
        ++agg.successes;
        runtimes.push_back(*record->first_success_time);
      }
    }
    agg.success_rate = agg.trials == 0
                           ? 0.0
                           : static_cast<double>(agg.successes) / static_cast<double>(agg.trials);
    if (!runtimes.empty()) {
      std::sort(runtimes.begin(), runtimes.end());
      RuntimeStats stats;
      stats.count = static_cast<int>(runtimes.size());
      stats.mean = mean_std(runtimes).mean;
      stats.median = quantile(runtimes, 0.5);
      stats.iqr = quantile(runtimes, 0.75) - quantile(runtimes, 0.25);
      agg.runtime = stats;
    }

    std::map<long long, std::pair<std::vector<double>, std::vector<double>>> by_steps;
    std::map<long long, long long> rollouts_at;
    for (const TrialRecord* record : group) {
      for (const IterationRecord& row : record->iterations) {
        by_steps[row.cumulative_steps].first.push_back(row.reward);
        by_steps[row.cumulative_steps].second.push_back(row.objective);
        rollouts_at[row.cumulative_steps] = row.cumulative_rollouts;
      }
    }
    for (const auto& [steps, values] : by_steps) {
      const MeanStd reward = mean_std(values.first);
      const MeanStd quality = mean_std(values.second);
      agg.curve.push_back({steps, rollouts_at[steps], static_cast<int>(values.first.size()),
                           reward.mean, reward.std, quality.mean, quality.std});
    }
    out.push_back(std::move(agg));
  }
  return out;
}

Matrix sensitivity_grid(const Scenario& scenario, const std::vector<int>& step_counts,
                        const std::vector<int>& iteration_counts,
                        const std::vector<std::uint64_t>& seeds, const OptimizerConfig& base) {
  if (step_counts.empty() || iteration_counts.empty() || seeds.empty()) {
    throw std::invalid_argument("sensitivity_grid: all axes must be non-empty");
  }
  Matrix rates(static_cast<Eigen::Index>(iteration_counts.size()),
               static_cast<Eigen::Index>(step_counts.size()));
  for (std::size_t row = 0; row < iteration_counts.size(); ++row) {
    for (std::size_t col = 0; col < step_counts.size(); ++col) {
      SolverSpec spec;
      spec.name = "d4orm";
      spec.d4orm = base;
      spec.d4orm.max_iterations = iteration_counts[row];
      spec.d4orm.denoiser.steps = step_counts[col];
      spec.d4orm.stop_on_success = true;
      int successes = 0;
      for (const std::uint64_t seed : seeds) {
        const TrialRecord record = run_trial(spec, scenario, seed);
        if (record.first_success_step) ++successes;
      }
      rates(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          static_cast<double>(successes) / static_cast<double>(seeds.size());
    }
  }
  return rates;
}

void write_trial_csv(const TrialRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trial_csv: cannot open " + path);
  out << "solver,scenario,seed,iteration,cumulative_steps,cumulative_rollouts,"
         "reward,best_reward,objective,success,wall_seconds\n";
  out.precision(17);
  for (const IterationRecord& row : record.iterations) {
    out << record.solver_id << ',' << record.scenario_id << ',' << record.seed << ','
        << row.iteration << ',' << row.cumulative_steps << ',' << row.cumulative_rollouts << ','
        << row.reward << ',' << row.best_reward << ',' << row.objective << ','
        << (row.success ? 1 : 0) << ',' << row.wall_seconds << '\n';
  }
}

TrialRecord read_trial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trial_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_trial_csv: empty file " + path);

  TrialRecord record;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 11) {
      throw std::runtime_error("read_trial_csv: malformed row in " + path);
    }
    record.solver_id = fields[0];
    record.scenario_id = fields[1];
    record.seed = std::stoull(fields[2]);
    IterationRecord row{};
    row.iteration = std::stoi(fields[3]);
    row.cumulative_steps = std::stoll(fields[4]);
    row.cumulative_rollouts = std::stoll(fields[5]);
    row.reward = std::stod(fields[6]);
    row.best_reward = std::stod(fields[7]);
    row.objective = std::stod(fields[8]);
    row.success = fields[9] == "1";
    row.wall_seconds = std::stod(fields[10]);
    record.iterations.push_back(row);
    if (row.success && !record.first_success_step) {
      record.first_success_step = row.cumulative_steps;
      record.first_success_rollouts = row.cumulative_rollouts;
      record.first_success_time = row.wall_seconds;
    }
  }
  return record;
}

nlohmann::json aggregate_to_json(const std::vector<Aggregate>& aggregates) {
  nlohmann::json j = nlohmann::json::array();
  for (const Aggregate& agg : aggregates) {
    nlohmann::json entry;
    entry["solver"] = agg.solver_id;
    entry["scenario"] = agg.scenario_id;
    entry["trials"] = agg.trials;
    entry["successes"] = agg.successes;
    entry["success_rate"] = agg.success_rate;
    if (agg.runtime) {
      entry["runtime"] = {{"count", agg.runtime->count},
                          {"mean", agg.runtime->mean},
                          {"median", agg.runtime->median},
                          {"iqr", agg.runtime->iqr}};
    } else {
      entry["runtime"] = nullptr;  // no successful runs to aggregate
    }
    entry["curve"] = nlohmann::json::array();
    for (const CurvePoint& point : agg.curve) {
      entry["curve"].push_back({{"steps", point.steps},
                                {"rollouts", point.rollouts},
                                {"count", point.count},
                                {"reward_mean", point.reward_mean},
                                {"reward_std", point.reward_std},
                                {"objective_mean", point.objective_mean},
                                {"objective_std", point.objective_std}});
    }
    j.push_back(entry);
  }
  return j;
}

}  // namespace d4orm
