#include "ldgen/diffusion.hpp"

#include <cmath>
#include <string>

#include "ldgen/ops.hpp"

namespace ldgen {

NoiseSchedule make_noise_schedule(std::int64_t timesteps, double beta_start,
                                  double beta_end) {
  if (timesteps < 1) {
    throw ConfigError("noise schedule: timesteps must be >= 1");
  }
  if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end) {
    throw ConfigError("noise schedule: need 0 < beta_start <= beta_end < 1");
  }
  NoiseSchedule s;
  s.timesteps = timesteps;
  s.beta_start = beta_start;
  s.beta_end = beta_end;
  s.betas.assign(timesteps + 1, 0.0);
  s.alphas.assign(timesteps + 1, 1.0);
  s.alpha_bar.assign(timesteps + 1, 1.0);
  for (std::int64_t t = 1; t <= timesteps; ++t) {
    const double frac =
        timesteps == 1
            ? 0.0
            : static_cast<double>(t - 1) / static_cast<double>(timesteps - 1);
    s.betas[t] = beta_start + (beta_end - beta_start) * frac;
    s.alphas[t] = 1.0 - s.betas[t];
    s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alphas[t];
  }
  return s;
}

Tensor q_sample(const Tensor &x0, std::int64_t t, const Tensor &eps,
                const NoiseSchedule &sched) {
  if (t < 1 || t > sched.timesteps) {
    throw ConfigError("q_sample: t " + std::to_string(t) + " out of [1, " +
                      std::to_string(sched.timesteps) + "]");
  }
  if (!same_shape(x0.shape(), eps.shape())) {
    throw DimensionError("q_sample: x0 " + shape_str(x0.shape()) + " vs eps " +
                         shape_str(eps.shape()));
  }
  const double ab = sched.alpha_bar[t];
  return add(mul_const(x0, std::sqrt(ab)),
             mul_const(eps, std::sqrt(1.0 - ab)));
}

Tensor denoise_loss(const Tensor &eps_hat, const Tensor &eps) {
  if (!same_shape(eps_hat.shape(), eps.shape())) {
    throw DimensionError("denoise_loss: " + shape_str(eps_hat.shape()) +
                         " vs " + shape_str(eps.shape()));
  }
  Tensor diff = sub(eps_hat, eps);
  return mul_const(sum(mul(diff, diff)),
                   1.0 / static_cast<double>(eps.numel()));
}

}  // namespace ldgen
