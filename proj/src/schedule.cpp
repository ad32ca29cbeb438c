#include "d4orm/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace d4orm {

NoiseSchedule make_schedule(int steps, double alpha_bar_final) {
  if (steps < 1) {
    throw std::invalid_argument("make_schedule: steps must be >= 1, got " +
                                std::to_string(steps));
  }
  if (!(alpha_bar_final > 0.0) || !(alpha_bar_final < 1.0)) {
    throw std::invalid_argument("make_schedule: alpha_bar_final must lie in (0, 1), got " +
                                std::to_string(alpha_bar_final));
  }
  NoiseSchedule schedule;
  schedule.alpha_bar.resize(steps + 1);
  schedule.alpha.resize(steps);
  schedule.alpha_bar[0] = 1.0;
  for (int i = 1; i <= steps; ++i) {
    schedule.alpha_bar[i] = std::pow(alpha_bar_final, static_cast<double>(i) / steps);
    schedule.alpha[i - 1] = schedule.alpha_bar[i] / schedule.alpha_bar[i - 1];
  }
  return schedule;
}

SamplingSpread sampling_spread(const NoiseSchedule& schedule, int i) {
  if (i < 1 || i > schedule.steps()) {
    throw std::invalid_argument("sampling_spread: step index " + std::to_string(i) +
                                " outside 1.." + std::to_string(schedule.steps()));
  }
  const double ab = schedule.alpha_bar[i];
  return {1.0 / std::sqrt(ab), std::sqrt(1.0 / ab - 1.0)};
}

}  // namespace d4orm
