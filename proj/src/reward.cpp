#include "d4orm/reward.hpp"

#include <cmath>
#include <stdexcept>

#include "d4orm/scenario.hpp"

namespace d4orm {

namespace {

void check_consistent(const JointTrajectory& trajectory, const Scenario& scenario,
                      const char* what) {
  if (trajectory.robots != scenario.robots) {
    throw std::invalid_argument(std::string(what) + ": trajectory has " +
                                std::to_string(trajectory.robots) + " robots, scenario " +
                                std::to_string(scenario.robots));
  }
  if (trajectory.state_dim != static_cast<int>(scenario.starts.rows())) {
    throw std::invalid_argument(std::string(what) + ": state dimension mismatch");
  }
}

double squared_distance(const Matrix& columns, int a, int b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double d = columns(j, a) - columns(j, b);
    s += d * d;
  }
  return s;
}

}  // namespace

double goal_reward(const Matrix& states, int t, const Vector& start_position,
                   const Vector& goal_position) {
  const int pdim = static_cast<int>(goal_position.size());
  const double start_dist = (start_position - goal_position).norm();
  if (!(start_dist > 0.0)) {
    throw std::invalid_argument("goal_reward: start coincides with goal");
  }
  const double dist = (states.col(t).head(pdim) - goal_position).norm();
  return 1.0 - dist / start_dist;
}

double safety_reward(const Matrix& positions, int k, const RewardConfig& config) {
  const int n = static_cast<int>(positions.cols());
  const int pdim = static_cast<int>(positions.rows());
  const double margin = 2.0 * config.robot_radius + config.epsilon;
  const double margin_sq = margin * margin;
  for (int l = 0; l < n; ++l) {
    if (l == k) continue;
    if (squared_distance(positions, k, l, pdim) <= margin_sq) return -1.0;
  }
  return 0.0;
}

double obstacle_penalty(const Vector& position, double robot_radius,
                        const ObstacleSet& obstacles) {
  for (const Obstacle& obs : obstacles.obstacles) {
    const double limit = obs.radius + robot_radius;
    if ((position - obs.center).squaredNorm() <= limit * limit) return -1.0;
  }
  return 0.0;
}

double total_reward(const JointTrajectory& trajectory, const Scenario& scenario,
                    const RewardConfig& config) {
  check_consistent(trajectory, scenario, "total_reward");
  const int n = trajectory.robots;
  const int horizon = trajectory.horizon();
  const int pdim = scenario.position_dim();
  const int dx = trajectory.state_dim;
  const double margin = 2.0 * config.robot_radius + config.epsilon;
  const double margin_sq = margin * margin;
  const bool has_obstacles = !scenario.obstacles.empty();

  // Start-to-goal distances are fixed per robot; hoist the denominators.
  std::vector<double> start_dist(n);
  for (int k = 0; k < n; ++k) {
    start_dist[k] = (scenario.start_position(k) - scenario.goals.col(k)).norm();
    if (!(start_dist[k] > 0.0)) {
      throw std::invalid_argument("total_reward: robot " + std::to_string(k) +
                                  " starts on its goal (degenerate scenario)");
    }
  }

  double sum = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const auto column = trajectory.states.col(t);
    for (int k = 0; k < n; ++k) {
      double goal_dist_sq = 0.0;
      for (int j = 0; j < pdim; ++j) {
        const double d = column[k * dx + j] - scenario.goals(j, k);
        goal_dist_sq += d * d;
      }
      double value = 1.0 - std::sqrt(goal_dist_sq) / start_dist[k];

      for (int l = 0; l < n; ++l) {
        if (l == k) continue;
        double pair_sq = 0.0;
        for (int j = 0; j < pdim; ++j) {
          const double d = column[k * dx + j] - column[l * dx + j];
          pair_sq += d * d;
        }
        if (pair_sq <= margin_sq) {
          value -= config.w_t;
          break;
        }
      }

      if (has_obstacles) {
        for (const Obstacle& obs : scenario.obstacles.obstacles) {
          double obs_sq = 0.0;
          for (int j = 0; j < pdim; ++j) {
            const double d = column[k * dx + j] - obs.center[j];
            obs_sq += d * d;
          }
          const double limit = obs.radius + config.robot_radius;
          if (obs_sq <= limit * limit) {
            value -= config.obstacle_weight;
            break;
          }
        }
      }
      sum += value;
    }
  }
  return sum / (static_cast<double>(n) * horizon);
}

double total_reward(const JointTrajectory& trajectory, const Scenario& scenario) {
  return total_reward(trajectory, scenario, scenario.reward);
}

double objective(const JointTrajectory& trajectory, const Scenario& scenario,
                 const RewardConfig& config) {
  check_consistent(trajectory, scenario, "objective");
  const int n = trajectory.robots;
  const int horizon = trajectory.horizon();
  const int pdim = scenario.position_dim();
  const double tol_sq = config.goal_tolerance * config.goal_tolerance;

  long hits = 0;
  for (int t = 1; t <= horizon; ++t) {
    for (int k = 0; k < n; ++k) {
      double goal_dist_sq = 0.0;
      for (int j = 0; j < pdim; ++j) {
        const double d = trajectory.states(k * trajectory.state_dim + j, t) - scenario.goals(j, k);
        goal_dist_sq += d * d;
      }
      if (goal_dist_sq <= tol_sq) ++hits;
    }
  }
  return static_cast<double>(hits) / (static_cast<double>(n) * horizon);
}

double objective(const JointTrajectory& trajectory, const Scenario& scenario) {
  return objective(trajectory, scenario, scenario.reward);
}

SuccessReport check_success(const JointTrajectory& trajectory, const Scenario& scenario,
                            const RewardConfig& config) {
  check_consistent(trajectory, scenario, "check_success");
  const int n = trajectory.robots;
  const int horizon = trajectory.horizon();
  const int pdim = scenario.position_dim();
  const double safety_sq = 4.0 * config.robot_radius * config.robot_radius;

  for (int t = 0; t <= horizon; ++t) {
    for (int k = 0; k < n; ++k) {
      const Vector p_k = trajectory.position(k, t, pdim);
      for (int l = k + 1; l < n; ++l) {
        const Vector p_l = trajectory.position(l, t, pdim);
        if ((p_k - p_l).squaredNorm() <= safety_sq) {
          return {false, "safety: robots " + std::to_string(k) + " and " + std::to_string(l) +
                             " within 2*R_a at step " + std::to_string(t)};
        }
      }
      for (std::size_t o = 0; o < scenario.obstacles.size(); ++o) {
        const Obstacle& obs = scenario.obstacles.obstacles[o];
        const double limit = obs.radius + config.robot_radius;
        if ((p_k - obs.center).squaredNorm() <= limit * limit) {
          return {false, "obstacle: robot " + std::to_string(k) + " hits obstacle " +
                             std::to_string(o) + " at step " + std::to_string(t)};
        }
      }
    }
  }

  for (int k = 0; k < n; ++k) {
    const double end_dist = (trajectory.position(k, horizon, pdim) - scenario.goals.col(k)).norm();
    if (end_dist > config.goal_tolerance) {
      return {false, "terminal: robot " + std::to_string(k) + " ends " + std::to_string(end_dist) +
                         " m from its goal (tolerance " + std::to_string(config.goal_tolerance) +
                         ")"};
    }
  }
  return {true, ""};
}

SuccessReport check_success(const JointTrajectory& trajectory, const Scenario& scenario) {
  return check_success(trajectory, scenario, scenario.reward);
}

}  // namespace d4orm
