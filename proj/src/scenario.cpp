#include "d4orm/scenario.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "d4orm/rng.hpp"

namespace d4orm {

namespace {

constexpr int kMaxRejections = 10000;

void check_reward_config(const RewardConfig& reward) {
  if (reward.epsilon < 0.0) throw std::invalid_argument("scenario: epsilon must be >= 0");
  if (!(reward.robot_radius > 0.0)) {
    throw std::invalid_argument("scenario: robot_radius must be positive");
  }
  if (!(reward.goal_tolerance > 0.0)) {
    throw std::invalid_argument("scenario: goal_tolerance must be positive");
  }
}

Vector make_start_state(ModelKind kind, const Vector& position, const Vector& goal) {
  if (kind == ModelKind::Holo3D) {
    Vector x = Vector::Zero(6);
    x.head(3) = position;
    return x;
  }
  Vector x = Vector::Zero(4);
  x.head(2) = position;
  if (kind == ModelKind::DiffDrive) {
    x[2] = std::atan2(goal[1] - position[1], goal[0] - position[0]);
  }
  return x;
}

std::string base_id(const char* family, ModelKind kind, int robots) {
  return std::string(family) + "-" + to_string(kind) + "-n" + std::to_string(robots);
}

}  // namespace

void validate_scenario(const Scenario& scenario) {
  if (scenario.robots < 1) throw std::invalid_argument("scenario: needs at least one robot");
  const int n = scenario.robots;
  const int pdim = scenario.position_dim();
  const int dx = scenario.model_kind == ModelKind::Holo3D ? 6 : 4;
  if (scenario.starts.rows() != dx || static_cast<int>(scenario.starts.cols()) != n) {
    throw std::invalid_argument("scenario: starts must be state_dim x robots");
  }
  if (scenario.goals.rows() != pdim || static_cast<int>(scenario.goals.cols()) != n) {
    throw std::invalid_argument("scenario: goals must be position_dim x robots");
  }
  if (!scenario.starts.allFinite() || !scenario.goals.allFinite()) {
    throw std::invalid_argument("scenario: non-finite start or goal");
  }
  if (!(scenario.workspace_diameter > 0.0)) {
    throw std::invalid_argument("scenario: workspace diameter must be positive");
  }
  check_reward_config(scenario.reward);

  const double min_sep = 2.0 * scenario.reward.robot_radius;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      const double start_dist =
          (scenario.starts.col(k).head(pdim) - scenario.starts.col(l).head(pdim)).norm();
      if (start_dist <= min_sep) {
        throw std::invalid_argument("scenario: robots " + std::to_string(k) + " and " +
                                    std::to_string(l) + " start within 2*R_a");
      }
      const double goal_dist = (scenario.goals.col(k) - scenario.goals.col(l)).norm();
      if (goal_dist <= min_sep) {
        throw std::invalid_argument("scenario: goals of robots " + std::to_string(k) + " and " +
                                    std::to_string(l) + " lie within 2*R_a");
      }
    }
    if ((scenario.starts.col(k).head(pdim) - scenario.goals.col(k)).norm() <= 0.0) {
      throw std::invalid_argument("scenario: robot " + std::to_string(k) +
                                  " starts exactly on its goal (degenerate)");
    }
  }

  for (std::size_t o = 0; o < scenario.obstacles.size(); ++o) {
    const Obstacle& obs = scenario.obstacles.obstacles[o];
    if (!(obs.radius > 0.0)) {
      throw std::invalid_argument("scenario: obstacle " + std::to_string(o) +
                                  " has non-positive radius");
    }
    if (static_cast<int>(obs.center.size()) != pdim) {
      throw std::invalid_argument("scenario: obstacle " + std::to_string(o) +
                                  " center dimension does not match the workspace");
    }
    const double clearance = obs.radius + scenario.reward.robot_radius;
    for (int k = 0; k < n; ++k) {
      if ((scenario.starts.col(k).head(pdim) - obs.center).norm() <= clearance) {
        throw std::invalid_argument("scenario: start of robot " + std::to_string(k) +
                                    " lies inside inflated obstacle " + std::to_string(o));
      }
      if ((scenario.goals.col(k) - obs.center).norm() <= clearance) {
        throw std::invalid_argument("scenario: goal of robot " + std::to_string(k) +
                                    " lies inside inflated obstacle " + std::to_string(o));
      }
    }
  }
}

Scenario antipodal_circle(int robots, double diameter, ModelKind kind,
                          const RewardConfig& reward) {
  if (robots < 1) throw std::invalid_argument("antipodal_circle: needs at least one robot");
  if (!(diameter > 0.0)) throw std::invalid_argument("antipodal_circle: diameter must be > 0");
  if (kind == ModelKind::Holo3D) {
    throw std::invalid_argument("antipodal_circle: use antipodal_sphere for 3D");
  }
  if (robots >= 2) {
    // Adjacent starts sit a chord D*sin(pi/n) apart.
    const double spacing = diameter * std::sin(M_PI / robots);
    if (spacing <= 2.0 * reward.robot_radius) {
      const double required = 2.0 * reward.robot_radius / std::sin(M_PI / robots);
      throw std::invalid_argument(
          "antipodal_circle: starts closer than 2*R_a; diameter must exceed " +
          std::to_string(required));
    }
  }

  Scenario scenario;
  scenario.id = base_id("antipodal-circle", kind, robots);
  scenario.model_kind = kind;
  scenario.robots = robots;
  scenario.workspace_diameter = diameter;
  scenario.reward = reward;
  scenario.starts.resize(kind == ModelKind::Holo3D ? 6 : 4, robots);
  scenario.goals.resize(2, robots);

  const double radius = diameter / 2.0;
  for (int k = 0; k < robots; ++k) {
    const double angle = 2.0 * M_PI * k / robots;
    Vector position(2);
    position << radius * std::cos(angle), radius * std::sin(angle);
    const Vector goal = -position;
    scenario.goals.col(k) = goal;
    scenario.starts.col(k) = make_start_state(kind, position, goal);
  }
  validate_scenario(scenario);
  return scenario;
}

Scenario antipodal_sphere(int robots, double diameter, const RewardConfig& reward) {
  if (robots < 1) throw std::invalid_argument("antipodal_sphere: needs at least one robot");
  if (!(diameter > 0.0)) throw std::invalid_argument("antipodal_sphere: diameter must be > 0");

  // Deterministic pole-to-pole spiral: latitudes evenly spaced in z including
  // both poles, azimuth advancing by the golden angle.
  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  Matrix unit(3, robots);
  for (int k = 0; k < robots; ++k) {
    const double z = robots == 1 ? 1.0 : 1.0 - 2.0 * k / (robots - 1.0);
    const double ring = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double azimuth = golden_angle * k;
    unit.col(k) << ring * std::cos(azimuth), ring * std::sin(azimuth), z;
  }

  if (robots >= 2) {
    double min_unit_dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < robots; ++k) {
      for (int l = k + 1; l < robots; ++l) {
        min_unit_dist = std::min(min_unit_dist, (unit.col(k) - unit.col(l)).norm());
      }
    }
    const double spacing = (diameter / 2.0) * min_unit_dist;
    if (spacing <= 2.0 * reward.robot_radius) {
      const double required = 4.0 * reward.robot_radius / min_unit_dist;
      throw std::invalid_argument(
          "antipodal_sphere: starts closer than 2*R_a; diameter must exceed " +
          std::to_string(required));
    }
  }

  Scenario scenario;
  scenario.id = base_id("antipodal-sphere", ModelKind::Holo3D, robots);
  scenario.model_kind = ModelKind::Holo3D;
  scenario.robots = robots;
  scenario.workspace_diameter = diameter;
  scenario.reward = reward;
  scenario.starts.resize(6, robots);
  scenario.goals.resize(3, robots);
  for (int k = 0; k < robots; ++k) {
    const Vector position = (diameter / 2.0) * unit.col(k);
    const Vector goal = -position;
    scenario.goals.col(k) = goal;
    scenario.starts.col(k) = make_start_state(ModelKind::Holo3D, position, goal);
  }
  validate_scenario(scenario);
  return scenario;
}

Scenario random_square(int robots, double diameter, std::uint64_t seed, ModelKind kind,
                       const RewardConfig& reward) {
  if (robots < 1) throw std::invalid_argument("random_square: needs at least one robot");
  if (!(diameter > 0.0)) throw std::invalid_argument("random_square: diameter must be > 0");
  if (kind == ModelKind::Holo3D) {
    throw std::invalid_argument("random_square: only 2D models are supported");
  }

  std::mt19937_64 engine(mix_seed(seed, 0x5c3a));
  std::uniform_real_distribution<double> coord(-diameter / 2.0, diameter / 2.0);
  const double min_sep = 2.0 * reward.robot_radius;

  const auto sample_positions = [&](const char* what) {
    Matrix positions(2, robots);
    for (int k = 0; k < robots; ++k) {
      int rejections = 0;
      while (true) {
        Vector candidate(2);
        candidate << coord(engine), coord(engine);
        bool clear = true;
        for (int l = 0; l < k; ++l) {
          if ((candidate - positions.col(l)).norm() <= min_sep) {
            clear = false;
            break;
          }
        }
        if (clear) {
          positions.col(k) = candidate;
          break;
        }
        if (++rejections >= kMaxRejections) {
          throw std::invalid_argument(std::string("random_square: could not place ") + what +
                                      " after " + std::to_string(kMaxRejections) +
                                      " rejections; workspace too dense");
        }
      }
    }
    return positions;
  };

  const Matrix start_positions = sample_positions("starts");
  const Matrix goal_positions = sample_positions("goals");

  Scenario scenario;
  scenario.id = base_id("random-square", kind, robots) + "-s" + std::to_string(seed);
  scenario.model_kind = kind;
  scenario.robots = robots;
  scenario.workspace_diameter = diameter;
  scenario.reward = reward;
  scenario.goals = goal_positions;
  scenario.starts.resize(4, robots);
  for (int k = 0; k < robots; ++k) {
    scenario.starts.col(k) = make_start_state(kind, start_positions.col(k), goal_positions.col(k));
  }
  validate_scenario(scenario);
  return scenario;
}

Scenario add_obstacles(const Scenario& scenario, const std::vector<Obstacle>& obstacles) {
  Scenario out = scenario;
  if (obstacles.empty()) return out;
  out.obstacles.obstacles.insert(out.obstacles.obstacles.end(), obstacles.begin(),
                                 obstacles.end());
  out.id += "-obs" + std::to_string(out.obstacles.size());
  validate_scenario(out);
  return out;
}

std::vector<Obstacle> obstacle_preset(const std::string& name, double diameter) {
  const double s = diameter / 4.0;  // layouts are drawn for a 4 m workspace
  const auto circle = [](double x, double y, double r) {
    Obstacle obs;
    obs.center = Vector(2);
    obs.center << x, y;
    obs.radius = r;
    return obs;
  };
  if (name == "obs1-large") return {circle(0.0, 0.0, 0.8 * s)};
  if (name == "obs1-small") return {circle(0.0, 0.0, 0.4 * s)};
  if (name == "obs2") {
    return {circle(-0.9 * s, 0.0, 0.45 * s), circle(0.9 * s, 0.0, 0.45 * s)};
  }
  if (name == "obs3") {
    return {circle(0.0, 1.0 * s, 0.4 * s), circle(-0.87 * s, -0.5 * s, 0.4 * s),
            circle(0.87 * s, -0.5 * s, 0.4 * s)};
  }
  if (name == "obs4") {
    return {circle(-0.9 * s, -0.9 * s, 0.4 * s), circle(-0.9 * s, 0.9 * s, 0.4 * s),
            circle(0.9 * s, -0.9 * s, 0.4 * s), circle(0.9 * s, 0.9 * s, 0.4 * s)};
  }
  throw std::invalid_argument("unknown obstacle preset: " + name);
}

std::vector<std::string> obstacle_preset_names() {
  return {"obs1-large", "obs1-small", "obs2", "obs3", "obs4"};
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["id"] = scenario.id;
  j["model"] = to_string(scenario.model_kind);
  j["robots"] = scenario.robots;
  j["workspace_diameter"] = scenario.workspace_diameter;
  j["starts"] = nlohmann::json::array();
  for (int k = 0; k < scenario.robots; ++k) {
    std::vector<double> state(scenario.starts.col(k).data(),
                              scenario.starts.col(k).data() + scenario.starts.rows());
    j["starts"].push_back(state);
  }
  j["goals"] = nlohmann::json::array();
  for (int k = 0; k < scenario.robots; ++k) {
    std::vector<double> goal(scenario.goals.col(k).data(),
                             scenario.goals.col(k).data() + scenario.goals.rows());
    j["goals"].push_back(goal);
  }
  j["obstacles"] = nlohmann::json::array();
  for (const Obstacle& obs : scenario.obstacles.obstacles) {
    nlohmann::json entry;
    entry["center"] = std::vector<double>(obs.center.data(), obs.center.data() + obs.center.size());
    entry["radius"] = obs.radius;
    j["obstacles"].push_back(entry);
  }
  j["reward"] = {{"w_t", scenario.reward.w_t},
                 {"epsilon", scenario.reward.epsilon},
                 {"robot_radius", scenario.reward.robot_radius},
                 {"goal_tolerance", scenario.reward.goal_tolerance},
                 {"obstacle_weight", scenario.reward.obstacle_weight}};
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1) {
    throw std::invalid_argument("scenario json: unsupported schema_version");
  }
  Scenario scenario;
  scenario.id = j.at("id").get<std::string>();
  scenario.model_kind = model_kind_from_string(j.at("model").get<std::string>());
  scenario.robots = j.at("robots").get<int>();
  scenario.workspace_diameter = j.at("workspace_diameter").get<double>();

  const auto& starts = j.at("starts");
  const auto& goals = j.at("goals");
  if (starts.size() != static_cast<std::size_t>(scenario.robots) ||
      goals.size() != static_cast<std::size_t>(scenario.robots)) {
    throw std::invalid_argument("scenario json: starts/goals count does not match robots");
  }
  const int dx = scenario.model_kind == ModelKind::Holo3D ? 6 : 4;
  const int pdim = scenario.position_dim();
  scenario.starts.resize(dx, scenario.robots);
  scenario.goals.resize(pdim, scenario.robots);
  for (int k = 0; k < scenario.robots; ++k) {
    const auto state = starts.at(k).get<std::vector<double>>();
    const auto goal = goals.at(k).get<std::vector<double>>();
    if (static_cast<int>(state.size()) != dx || static_cast<int>(goal.size()) != pdim) {
      throw std::invalid_argument("scenario json: state or goal dimension mismatch");
    }
    for (int jdx = 0; jdx < dx; ++jdx) scenario.starts(jdx, k) = state[jdx];
    for (int jdx = 0; jdx < pdim; ++jdx) scenario.goals(jdx, k) = goal[jdx];
  }

  for (const auto& entry : j.value("obstacles", nlohmann::json::array())) {
    Obstacle obs;
    const auto center = entry.at("center").get<std::vector<double>>();
    obs.center = Eigen::Map<const Vector>(center.data(), static_cast<Eigen::Index>(center.size()));
    obs.radius = entry.at("radius").get<double>();
    scenario.obstacles.obstacles.push_back(obs);
  }

  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    scenario.reward.w_t = r.value("w_t", scenario.reward.w_t);
    scenario.reward.epsilon = r.value("epsilon", scenario.reward.epsilon);
    scenario.reward.robot_radius = r.value("robot_radius", scenario.reward.robot_radius);
    scenario.reward.goal_tolerance = r.value("goal_tolerance", scenario.reward.goal_tolerance);
    scenario.reward.obstacle_weight = r.value("obstacle_weight", scenario.reward.obstacle_weight);
  }
  validate_scenario(scenario);
  return scenario;
}

}  // namespace d4orm
