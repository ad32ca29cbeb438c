#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "d4orm/dynamics.hpp"
#include "d4orm/reward.hpp"
#include "d4orm/types.hpp"

namespace d4orm {

/// A deconfliction problem instance: joint start states, goal positions, the
/// workspace, obstacles, and the reward parameters used to solve it.
struct Scenario {
  std::string id;
  ModelKind model_kind{ModelKind::Holo2D};
  int robots{0};
  Matrix starts;  // state_dim x robots, zero initial velocity by construction
  Matrix goals;   // position_dim x robots
  double workspace_diameter{4.0};
  ObstacleSet obstacles;
  RewardConfig reward;

  int position_dim() const { return model_kind == ModelKind::Holo3D ? 3 : 2; }
  Vector start_position(int k) const { return starts.col(k).head(position_dim()); }
  Vector goal_position(int k) const { return goals.col(k); }
};

/// Throws std::invalid_argument when a scenario violates its invariants:
/// pairwise start/goal separation > 2*R_a, starts/goals clear of obstacles by
/// R_a, and no robot starting exactly on its goal.
void validate_scenario(const Scenario& scenario);

/// Starts equally spaced on a circle of the given diameter, each goal placed
/// diametrically opposite its start. DiffDrive robots face their goals.
Scenario antipodal_circle(int robots, double diameter, ModelKind kind,
                          const RewardConfig& reward = {});

/// 3D holonomic starts on a deterministic spiral lattice spanning pole to
/// pole, goals antipodal. Two robots land exactly on the poles.
Scenario antipodal_sphere(int robots, double diameter, const RewardConfig& reward = {});

/// Starts and goals rejection-sampled uniformly in a D x D square until the
/// separation invariants hold; deterministic in the seed. Throws after 10000
/// consecutive rejections.
Scenario random_square(int robots, double diameter, std::uint64_t seed,
                       ModelKind kind = ModelKind::Holo2D, const RewardConfig& reward = {});

/// Returns a copy with the obstacles attached and all invariants revalidated.
Scenario add_obstacles(const Scenario& scenario, const std::vector<Obstacle>& obstacles);

/// Named obstacle layouts (obs1-large, obs1-small, obs2, obs3, obs4), scaled
/// to the workspace diameter.
std::vector<Obstacle> obstacle_preset(const std::string& name, double diameter);
std::vector<std::string> obstacle_preset_names();

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

}  // namespace d4orm
