#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "d4orm/result.hpp"

namespace d4orm {

struct Scenario;

/// MPPI in the joint control space: Gaussian perturbations of a mean control
/// trajectory, softmax-weighted by the shared score_weights routine. No noise
/// schedule; the mean update is a plain weighted average.
struct MppiConfig {
  int batch{2048};     // M samples per iteration
  double lambda{0.1};  // same normalized-softmax temperature as the denoiser
  double sigma{1.0};   // per-dimension sampling std, in control units
  int iterations{1000};
  std::uint64_t seed{0};
  int horizon{100};
  double dt{0.1};
  std::optional<double> deadline_seconds{};
  bool stop_on_success{true};
  int workers{0};
};

/// Cross-entropy method on the same joint space: refit a diagonal Gaussian to
/// the elite fraction each iteration, with a floor on the std.
struct CemConfig {
  int batch{2048};
  double elite_fraction{0.1};
  double initial_std{1.0};
  double min_std{0.05};
  int iterations{1000};
  std::uint64_t seed{0};
  int horizon{100};
  double dt{0.1};
  std::optional<double> deadline_seconds{};
  bool stop_on_success{true};
  int workers{0};
};

SolveResult mppi_solve(const Scenario& scenario, const DynamicsModel& model,
                       const MppiConfig& config);

SolveResult cem_solve(const Scenario& scenario, const DynamicsModel& model,
                      const CemConfig& config);

/// Indices of the `count` highest rewards, ties broken by lower sample index;
/// returned in ascending index order.
std::vector<int> select_elites(const Vector& rewards, int count);

}  // namespace d4orm
