#pragma once

#include <string>
#include <vector>

#include "d4orm/dynamics.hpp"
#include "d4orm/types.hpp"

namespace d4orm {

struct Scenario;

struct RewardConfig {
  double w_t{2.0};             // weight on the inter-robot safety penalty
  double epsilon{0.05};        // margin added to 2*R_a in the safety penalty [m]
  double robot_radius{0.1};    // R_a [m]
  double goal_tolerance{0.1};  // goal-ball radius used by objective/success [m]
  double obstacle_weight{2.0};
};

struct Obstacle {
  Vector center;
  double radius{0.0};
};

struct ObstacleSet {
  std::vector<Obstacle> obstacles;

  bool empty() const { return obstacles.empty(); }
  std::size_t size() const { return obstacles.size(); }
};

/// Dense navigation reward for robot k at step t: 1 at the goal, 0 at the
/// start distance, negative beyond it. `states` is the robot's state_dim x
/// (H+1) sequence; positions are the leading entries matching goal size.
double goal_reward(const Matrix& states, int t, const Vector& start_position,
                   const Vector& goal_position);

/// -1 if any other robot is within 2*R_a + epsilon (inclusive) of robot k,
/// else 0. `positions` holds one column per robot at a single step.
double safety_reward(const Matrix& positions, int k, const RewardConfig& config);

/// -1 if the robot sphere touches or penetrates any obstacle, else 0.
double obstacle_penalty(const Vector& position, double robot_radius,
                        const ObstacleSet& obstacles);

/// Team reward: mean over robots and steps t = 1..H of
/// goal + w_t * safety + obstacle_weight * obstacle penalty.
double total_reward(const JointTrajectory& trajectory, const Scenario& scenario,
                    const RewardConfig& config);
double total_reward(const JointTrajectory& trajectory, const Scenario& scenario);

/// Fraction of robot-steps spent inside the goal ball, in [0, 1].
double objective(const JointTrajectory& trajectory, const Scenario& scenario,
                 const RewardConfig& config);
double objective(const JointTrajectory& trajectory, const Scenario& scenario);

struct SuccessReport {
  bool success{false};
  std::string first_violation;  // empty on success
};

/// A trajectory succeeds when every robot ends inside its goal ball, all
/// pairwise distances stay strictly above 2*R_a at every step (no epsilon),
/// and no robot ever touches an obstacle.
SuccessReport check_success(const JointTrajectory& trajectory, const Scenario& scenario,
                            const RewardConfig& config);
SuccessReport check_success(const JointTrajectory& trajectory, const Scenario& scenario);

}  // namespace d4orm
