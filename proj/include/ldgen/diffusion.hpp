#pragma once

#include <cstdint>
#include <vector>

#include "ldgen/tensor.hpp"

namespace ldgen {

// Linear-beta forward process constants; alpha_bar[0] == 1 by convention so
// timesteps are 1-based.
struct NoiseSchedule {
  std::int64_t timesteps = 0;
  std::vector<double> betas;      // beta_1..beta_T at [1..T], [0] unused
  std::vector<double> alphas;     // 1 - beta_t
  std::vector<double> alpha_bar;  // cumulative product, [0] == 1

  double beta_start = 1e-4;
  double beta_end = 0.02;
};

NoiseSchedule make_noise_schedule(std::int64_t timesteps,
                                  double beta_start = 1e-4,
                                  double beta_end = 0.02);

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps, 1 <= t <= T.
Tensor q_sample(const Tensor &x0, std::int64_t t, const Tensor &eps,
                const NoiseSchedule &sched);

// Mean squared error between predicted and true noise.
Tensor denoise_loss(const Tensor &eps_hat, const Tensor &eps);

}  // namespace ldgen
