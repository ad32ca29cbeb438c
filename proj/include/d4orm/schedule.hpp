#pragma once

#include "d4orm/types.hpp"

namespace d4orm {

/// Noise schedule: alpha[i-1] stores alpha_i for i = 1..N, alpha_bar[i] the
/// running product with alpha_bar[0] = 1. alpha_bar decreases strictly and
/// stays positive.
struct NoiseSchedule {
  Vector alpha;      // N entries
  Vector alpha_bar;  // N + 1 entries

  int steps() const { return static_cast<int>(alpha.size()); }
};

/// Geometric decay of alpha_bar: alpha_bar_i = alpha_bar_final^(i/N), so
/// alpha_i is constant and the terminal sampling std equals
/// sqrt(1/alpha_bar_final - 1).
NoiseSchedule make_schedule(int steps, double alpha_bar_final);

struct SamplingSpread {
  double mean_scale;  // 1 / sqrt(alpha_bar_i)
  double std;         // sqrt(1 / alpha_bar_i - 1)
};

/// Mean scale and std of the sampling distribution at denoising step i
/// (1 <= i <= N).
SamplingSpread sampling_spread(const NoiseSchedule& schedule, int i);

}  // namespace d4orm
