// Command-line front end: scenario generation, solving, benchmarking, and
// sensitivity sweeps. Configuration comes from a flat dotted-key JSON file
// plus command-line overrides; flags win.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "d4orm/bench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolved settings: file values overlaid by flag values (flags win).
class Settings {
 public:
  void set_from_file(const std::string& key, json value) {
    if (!overridden_.count(key)) values_[key] = std::move(value);
  }

  void set_override(const std::string& key, const std::string& value) {
    values_[key] = value;
    overridden_.insert(key);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.is_string()) return it->second.get<std::string>();
    return it->second.dump();
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      if (it->second.is_number()) return it->second.get<double>();
      return std::stod(it->second.get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: " + it->second.dump());
    }
  }

  long long get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      if (it->second.is_number_integer()) return it->second.get<long long>();
      if (it->second.is_number()) return static_cast<long long>(it->second.get<double>());
      return std::stoll(it->second.get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer: " + it->second.dump());
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.is_boolean()) return it->second.get<bool>();
    const std::string text =
        it->second.is_string() ? it->second.get<std::string>() : it->second.dump();
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: " + text);
  }

  std::vector<long long> get_int_list(const std::string& key,
                                      const std::vector<long long>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<long long> out;
    if (it->second.is_array()) {
      for (const auto& v : it->second) out.push_back(v.get<long long>());
      return out;
    }
    const std::string text =
        it->second.is_string() ? it->second.get<std::string>() : it->second.dump();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        out.push_back(std::stoll(item));
      } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' has a non-integer entry: " + item);
      }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
    return out;
  }

  /// Flat snapshot of every resolved key, embedded into output files so runs
  /// are replayable from the file alone.
  json snapshot() const {
    json j = json::object();
    for (const auto& [key, value] : values_) j[key] = value;
    return j;
  }

 private:
  std::map<std::string, json> values_;
  std::set<std::string> overridden_;
};

void load_config_file(Settings& settings, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    // Turn the byte offset into a line/column hint.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config parse error in " + path + " at line " + std::to_string(line) +
                      ", column " + std::to_string(column) + ": " + e.what());
  }
  if (!parsed.is_object()) {
    throw ConfigError("config file must be a JSON object of dotted keys: " + path);
  }
  for (const auto& [key, value] : parsed.items()) settings.set_from_file(key, value);
}

// Registers a string-valued flag that lands in the settings under `key`.
void kv_option(CLI::App* cmd, Settings& settings, const std::string& flag,
               const std::string& key, const std::string& desc) {
  cmd->add_option_function<std::string>(
      flag, [&settings, key](const std::string& value) { settings.set_override(key, value); },
      desc);
}

void add_common_options(CLI::App* cmd, Settings& settings, std::string& config_path,
                        bool& force) {
  cmd->add_option("--config", config_path, "JSON config file with flat dotted keys");
  cmd->add_flag("--force", force, "overwrite existing outputs");
  kv_option(cmd, settings, "--seed", "seed", "base RNG seed");
  kv_option(cmd, settings, "--out", "out", "output directory");
}

void add_scenario_options(CLI::App* cmd, Settings& settings) {
  kv_option(cmd, settings, "--scenario", "scenario.kind",
            "antipodal-circle | antipodal-sphere | random-square");
  kv_option(cmd, settings, "--scenario-file", "scenario.file", "load a scenario JSON file");
  kv_option(cmd, settings, "--n", "scenario.n", "number of robots");
  kv_option(cmd, settings, "--model", "scenario.model", "diffdrive | holo2d | holo3d");
  kv_option(cmd, settings, "--diameter", "scenario.diameter", "workspace diameter [m]");
  kv_option(cmd, settings, "--scenario-seed", "scenario.seed", "seed for random-square");
  kv_option(cmd, settings, "--obstacles", "scenario.obstacles",
            "obstacle preset (obs1-large, obs1-small, obs2, obs3, obs4)");
  kv_option(cmd, settings, "--robot-radius", "reward.robot_radius", "robot radius R_a [m]");
  kv_option(cmd, settings, "--goal-tolerance", "reward.goal_tolerance", "goal ball radius [m]");
  kv_option(cmd, settings, "--w-t", "reward.w_t", "safety penalty weight");
  kv_option(cmd, settings, "--epsilon", "reward.epsilon", "safety margin epsilon [m]");
  kv_option(cmd, settings, "--obstacle-weight", "reward.obstacle_weight",
            "obstacle penalty weight");
}

void add_solver_options(CLI::App* cmd, Settings& settings) {
  kv_option(cmd, settings, "--solver", "solver.name", "d4orm | mppi | cem");
  kv_option(cmd, settings, "--iters", "solver.iterations", "deformation iterations (d4orm)");
  kv_option(cmd, settings, "--deadline", "solver.deadline", "wall-clock deadline [s]");
  kv_option(cmd, settings, "--stop-on-success", "solver.stop_on_success", "true | false");
  kv_option(cmd, settings, "--H", "run.H", "planning horizon steps");
  kv_option(cmd, settings, "--dt", "run.dt", "integration step [s]");
  kv_option(cmd, settings, "--workers", "run.workers", "worker threads (0 = all cores)");
  kv_option(cmd, settings, "--N", "denoiser.N", "denoising steps per iteration");
  kv_option(cmd, settings, "--M", "denoiser.M", "rollouts per denoising step");
  kv_option(cmd, settings, "--lambda", "denoiser.lambda", "softmax temperature");
  kv_option(cmd, settings, "--alpha-bar-final", "denoiser.alpha_bar_final",
            "terminal alpha_bar of the noise schedule");
  kv_option(cmd, settings, "--mppi-sigma", "mppi.sigma", "MPPI sampling std");
  kv_option(cmd, settings, "--mppi-iters", "mppi.iterations", "MPPI iterations");
  kv_option(cmd, settings, "--cem-elite-fraction", "cem.elite_fraction", "CEM elite fraction");
  kv_option(cmd, settings, "--cem-iters", "cem.iterations", "CEM iterations");
}

d4orm::RewardConfig reward_from(const Settings& settings) {
  d4orm::RewardConfig reward;
  reward.w_t = settings.get_double("reward.w_t", reward.w_t);
  reward.epsilon = settings.get_double("reward.epsilon", reward.epsilon);
  reward.robot_radius = settings.get_double("reward.robot_radius", reward.robot_radius);
  reward.goal_tolerance = settings.get_double("reward.goal_tolerance", reward.goal_tolerance);
  reward.obstacle_weight = settings.get_double("reward.obstacle_weight", reward.obstacle_weight);
  return reward;
}

d4orm::Scenario scenario_from(const Settings& settings) {
  if (settings.has("scenario.file")) {
    const std::string path = settings.get_string("scenario.file", "");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("scenario file parse error in " + path + ": " + e.what());
    }
    return d4orm::scenario_from_json(j);
  }

  const std::string kind = settings.get_string("scenario.kind", "antipodal-circle");
  const int n = static_cast<int>(settings.get_int("scenario.n", 8));
  const double diameter = settings.get_double("scenario.diameter", 4.0);
  const auto model =
      d4orm::model_kind_from_string(settings.get_string("scenario.model", "holo2d"));
  const d4orm::RewardConfig reward = reward_from(settings);

  d4orm::Scenario scenario;
  if (kind == "antipodal-circle") {
    scenario = d4orm::antipodal_circle(n, diameter, model, reward);
  } else if (kind == "antipodal-sphere") {
    scenario = d4orm::antipodal_sphere(n, diameter, reward);
  } else if (kind == "random-square") {
    const auto seed = static_cast<std::uint64_t>(settings.get_int("scenario.seed", 0));
    scenario = d4orm::random_square(n, diameter, seed, model, reward);
  } else {
    throw ConfigError("unknown scenario kind: " + kind);
  }

  if (settings.has("scenario.obstacles")) {
    const std::string preset = settings.get_string("scenario.obstacles", "");
    scenario = d4orm::add_obstacles(scenario, d4orm::obstacle_preset(preset, diameter));
  }
  return scenario;
}

d4orm::SolverSpec solver_from(const Settings& settings) {
  d4orm::SolverSpec spec;
  spec.name = settings.get_string("solver.name", "d4orm");
  if (spec.name != "d4orm" && spec.name != "mppi" && spec.name != "cem") {
    throw ConfigError("unknown solver: " + spec.name);
  }

  const int horizon = static_cast<int>(settings.get_int("run.H", 100));
  const double dt = settings.get_double("run.dt", 0.1);
  const int workers = static_cast<int>(settings.get_int("run.workers", 0));
  const auto seed = static_cast<std::uint64_t>(settings.get_int("seed", 0));
  const bool stop_on_success = settings.get_bool("solver.stop_on_success", true);
  std::optional<double> deadline;
  if (settings.has("solver.deadline")) {
    deadline = settings.get_double("solver.deadline", 0.0);
  }
  const int batch = static_cast<int>(settings.get_int("denoiser.M", 2048));

  spec.d4orm.max_iterations = static_cast<int>(settings.get_int("solver.iterations", 10));
  spec.d4orm.deadline_seconds = deadline;
  spec.d4orm.stop_on_success = stop_on_success;
  spec.d4orm.horizon = horizon;
  spec.d4orm.dt = dt;
  spec.d4orm.denoiser.steps = static_cast<int>(settings.get_int("denoiser.N", 100));
  spec.d4orm.denoiser.batch = batch;
  spec.d4orm.denoiser.lambda = settings.get_double("denoiser.lambda", 0.1);
  spec.d4orm.denoiser.alpha_bar_final = settings.get_double("denoiser.alpha_bar_final", 0.05);
  spec.d4orm.denoiser.seed = seed;
  spec.d4orm.denoiser.workers = workers;

  spec.mppi.batch = static_cast<int>(settings.get_int("mppi.M", batch));
  spec.mppi.lambda = settings.get_double("mppi.lambda", 0.1);
  spec.mppi.sigma = settings.get_double("mppi.sigma", 1.0);
  spec.mppi.iterations = static_cast<int>(settings.get_int("mppi.iterations", 1000));
  spec.mppi.seed = seed;
  spec.mppi.horizon = horizon;
  spec.mppi.dt = dt;
  spec.mppi.deadline_seconds = deadline;
  spec.mppi.stop_on_success = stop_on_success;
  spec.mppi.workers = workers;

  spec.cem.batch = static_cast<int>(settings.get_int("cem.M", batch));
  spec.cem.elite_fraction = settings.get_double("cem.elite_fraction", 0.1);
  spec.cem.initial_std = settings.get_double("cem.initial_std", 1.0);
  spec.cem.min_std = settings.get_double("cem.min_std", 0.05);
  spec.cem.iterations = static_cast<int>(settings.get_int("cem.iterations", 1000));
  spec.cem.seed = seed;
  spec.cem.horizon = horizon;
  spec.cem.dt = dt;
  spec.cem.deadline_seconds = deadline;
  spec.cem.stop_on_success = stop_on_success;
  spec.cem.workers = workers;
  return spec;
}

json trajectory_to_json(const d4orm::JointTrajectory& trajectory) {
  json robots = json::array();
  for (int k = 0; k < trajectory.robots; ++k) {
    json steps = json::array();
    for (int t = 0; t <= trajectory.horizon(); ++t) {
      const d4orm::Vector state = trajectory.state(k, t);
      const d4orm::Vector control = trajectory.control(k, t);
      steps.push_back(
          {{"time", t * trajectory.dt},
           {"state", std::vector<double>(state.data(), state.data() + state.size())},
           {"control", std::vector<double>(control.data(), control.data() + control.size())}});
    }
    robots.push_back({{"robot", k}, {"steps", steps}});
  }
  return robots;
}

int cmd_solve(Settings& settings, bool /*force*/) {
  const d4orm::Scenario scenario = scenario_from(settings);
  const d4orm::SolverSpec spec = solver_from(settings);
  const auto seed = static_cast<std::uint64_t>(settings.get_int("seed", 0));
  const fs::path out_dir = settings.get_string("out", ".");
  fs::create_directories(out_dir);

  d4orm::SolveResult result;
  const d4orm::DynamicsModel model = d4orm::DynamicsModel::make(scenario.model_kind);
  if (spec.name == "d4orm") {
    auto cfg = spec.d4orm;
    cfg.denoiser.seed = seed;
    result = d4orm::solve(scenario, model, cfg);
  } else if (spec.name == "mppi") {
    auto cfg = spec.mppi;
    cfg.seed = seed;
    result = d4orm::mppi_solve(scenario, model, cfg);
  } else {
    auto cfg = spec.cem;
    cfg.seed = seed;
    result = d4orm::cem_solve(scenario, model, cfg);
  }

  json out;
  out["schema_version"] = 1;
  out["scenario"] = d4orm::scenario_to_json(scenario);
  out["config"] = settings.snapshot();
  out["config"]["solver.name"] = spec.name;
  out["result"] = {{"success", result.success},
                   {"reward", result.best_reward},
                   {"objective", d4orm::objective(result.best_trajectory, scenario)},
                   {"iterations", result.iterations_used},
                   {"total_steps", result.total_denoise_steps},
                   {"dt", result.best_trajectory.dt}};
  out["result"]["robots"] = trajectory_to_json(result.best_trajectory);

  const fs::path traj_path = out_dir / "trajectory.json";
  std::ofstream traj_file(traj_path);
  if (!traj_file) throw ConfigError("cannot write " + traj_path.string());
  traj_file << out.dump(2) << '\n';

  const fs::path trace_path = out_dir / "denoise_trace.csv";
  std::ofstream trace_file(trace_path);
  if (!trace_file) throw ConfigError("cannot write " + trace_path.string());
  trace_file << "iteration,step,best_sample_reward,mean_sample_reward,weight_entropy\n";
  trace_file.precision(17);
  for (std::size_t iteration = 0; iteration < result.traces.size(); ++iteration) {
    for (const auto& step : result.traces[iteration].steps) {
      trace_file << iteration + 1 << ',' << step.step << ',' << step.best_reward << ','
                 << step.mean_reward << ',' << step.weight_entropy << '\n';
    }
  }

  std::cout << "success=" << (result.success ? "true" : "false")
            << " reward=" << result.best_reward << " iterations=" << result.iterations_used
            << " steps=" << result.total_denoise_steps << " wall_s=" << result.wall_time
            << " out=" << traj_path.string() << '\n';
  return result.success ? 0 : 2;
}

int cmd_bench(Settings& settings, bool force) {
  const d4orm::Scenario scenario = scenario_from(settings);
  const fs::path out_dir = settings.get_string("out", "bench_out");
  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force) {
    throw ConfigError("output directory " + out_dir.string() +
                      " already has results; pass --force to overwrite");
  }
  fs::create_directories(out_dir);

  std::vector<std::string> solver_names;
  {
    std::stringstream ss(settings.get_string("bench.solvers", "d4orm"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) solver_names.push_back(item);
    }
  }
  if (solver_names.empty()) throw ConfigError("bench.solvers must name at least one solver");

  const int trials = static_cast<int>(settings.get_int("bench.trials", 10));
  if (trials < 1) throw ConfigError("bench.trials must be >= 1");
  const auto seed_base = static_cast<std::uint64_t>(settings.get_int("seed", 0));

  std::vector<d4orm::TrialRecord> records;
  for (const std::string& name : solver_names) {
    Settings local = settings;
    local.set_override("solver.name", name);
    const d4orm::SolverSpec spec = solver_from(local);
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(trial);
      d4orm::TrialRecord record = d4orm::run_trial(spec, scenario, seed);
      const fs::path csv_path =
          out_dir / (name + "_" + scenario.id + "_" + std::to_string(seed) + ".csv");
      d4orm::write_trial_csv(record, csv_path.string());
      records.push_back(std::move(record));
    }
  }

  const std::vector<d4orm::Aggregate> aggregates = d4orm::aggregate(records);
  const fs::path summary_path = out_dir / "summary.json";
  std::ofstream summary(summary_path);
  if (!summary) throw ConfigError("cannot write " + summary_path.string());
  summary << d4orm::aggregate_to_json(aggregates).dump(2) << '\n';

  for (const d4orm::Aggregate& agg : aggregates) {
    std::cout << agg.solver_id << " on " << agg.scenario_id
              << ": success_rate=" << agg.success_rate << " (" << agg.successes << "/"
              << agg.trials << ")";
    if (agg.runtime) std::cout << " median_runtime_s=" << agg.runtime->median;
    std::cout << '\n';
  }
  std::cout << "wrote " << records.size() << " trial files and " << summary_path.string() << '\n';
  return 0;
}

int cmd_sweep(Settings& settings, bool force) {
  const d4orm::Scenario scenario = scenario_from(settings);
  const fs::path out_dir = settings.get_string("out", "sweep_out");
  const fs::path csv_path = out_dir / "sensitivity.csv";
  if (fs::exists(csv_path) && !force) {
    throw ConfigError("sweep output " + csv_path.string() +
                      " already exists; pass --force to overwrite");
  }
  fs::create_directories(out_dir);

  const auto steps_axis = settings.get_int_list("sweep.N", {25, 50, 100});
  const auto iters_axis = settings.get_int_list("sweep.iterations", {1, 2, 5, 10});
  const int trials = static_cast<int>(settings.get_int("bench.trials", 10));
  const auto seed_base = static_cast<std::uint64_t>(settings.get_int("seed", 0));

  std::vector<int> step_counts(steps_axis.begin(), steps_axis.end());
  std::vector<int> iteration_counts(iters_axis.begin(), iters_axis.end());
  std::vector<std::uint64_t> seeds;
  for (int trial = 0; trial < trials; ++trial) {
    seeds.push_back(seed_base + static_cast<std::uint64_t>(trial));
  }

  Settings local = settings;
  local.set_override("solver.name", "d4orm");
  const d4orm::Matrix rates = d4orm::sensitivity_grid(scenario, step_counts, iteration_counts,
                                                      seeds, solver_from(local).d4orm);

  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot write " + csv_path.string());
  out << "iterations\\N";
  for (const int steps : step_counts) out << ',' << steps;
  out << '\n';
  out.precision(17);
  for (std::size_t row = 0; row < iteration_counts.size(); ++row) {
    out << iteration_counts[row];
    for (std::size_t col = 0; col < step_counts.size(); ++col) {
      out << ',' << rates(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }
    out << '\n';
  }
  std::cout << "wrote " << csv_path.string() << '\n';
  return 0;
}

int cmd_gen_scenario(Settings& settings, bool force) {
  const d4orm::Scenario scenario = scenario_from(settings);
  const fs::path out_dir = settings.get_string("out", ".");
  fs::create_directories(out_dir);
  const fs::path path = out_dir / (scenario.id + ".json");
  if (fs::exists(path) && !force) {
    throw ConfigError("scenario file " + path.string() + " already exists; pass --force");
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << d4orm::scenario_to_json(scenario).dump(2) << '\n';
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot trajectory deconfliction via denoised deformations"};
  app.require_subcommand(1);

  Settings settings;
  std::string config_path;
  bool force = false;

  auto* solve_cmd = app.add_subcommand("solve", "solve one scenario and export the trajectory");
  auto* bench_cmd = app.add_subcommand("bench", "run solver/seed grids and aggregate metrics");
  auto* sweep_cmd = app.add_subcommand("sweep", "success-rate grid over (N, iterations)");
  auto* gen_cmd = app.add_subcommand("gen-scenario", "write a scenario JSON file");

  for (CLI::App* cmd : {solve_cmd, bench_cmd, sweep_cmd, gen_cmd}) {
    add_common_options(cmd, settings, config_path, force);
    add_scenario_options(cmd, settings);
  }
  for (CLI::App* cmd : {solve_cmd, bench_cmd, sweep_cmd}) {
    add_solver_options(cmd, settings);
  }
  kv_option(bench_cmd, settings, "--solvers", "bench.solvers", "comma list: d4orm,mppi,cem");
  kv_option(bench_cmd, settings, "--trials", "bench.trials", "seeds per solver");
  kv_option(sweep_cmd, settings, "--trials", "bench.trials", "seeds per grid cell");
  kv_option(sweep_cmd, settings, "--sweep-N", "sweep.N", "comma list of denoising steps");
  kv_option(sweep_cmd, settings, "--sweep-iters", "sweep.iterations",
            "comma list of iteration counts");

  CLI11_PARSE(app, argc, argv);

  try {
    // Flags were already recorded during parsing; file values fill the rest.
    if (!config_path.empty()) load_config_file(settings, config_path);

    if (solve_cmd->parsed()) return cmd_solve(settings, force);
    if (bench_cmd->parsed()) return cmd_bench(settings, force);
    if (sweep_cmd->parsed()) return cmd_sweep(settings, force);
    if (gen_cmd->parsed()) return cmd_gen_scenario(settings, force);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
