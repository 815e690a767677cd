#pragma once

#include <functional>
#include <vector>

#include "ldgen/tensor.hpp"

namespace ldgen {

// Central-difference check of reverse-mode gradients. `f` must rebuild its
// graph from the current parameter values on every call and return a scalar.
// Returns the max over all coordinates of
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// eps must lie in [1e-7, 1e-3]; a non-finite evaluation of f throws.
double grad_check(const std::function<Tensor()> &f,
                  const std::vector<Tensor> &params, double eps = 1e-5);

}  // namespace ldgen
