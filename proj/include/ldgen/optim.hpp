#pragma once

#include <cstdint>
#include <vector>

#include "ldgen/tensor.hpp"

namespace ldgen {

// Bias-corrected adaptive-moment state for one parameter list. Moment
// buffers are indexed parallel to the list handed to adam_step, which must
// stay stable for the lifetime of the state.
struct OptimizerState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;

  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static OptimizerState init(const std::vector<Tensor> &params, double lr,
                             double beta1 = 0.9, double beta2 = 0.999,
                             double epsilon = 1e-8);
};

// One update over all parameters; increments the step counter and zeroes
// the gradients it consumed. Throws GradError when a parameter has no
// populated gradient.
void adam_step(std::vector<Tensor> &params, OptimizerState &state);

}  // namespace ldgen
