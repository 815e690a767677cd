#include "ldgen/optim.hpp"

#include <cmath>
#include <string>

namespace ldgen {

OptimizerState OptimizerState::init(const std::vector<Tensor> &params,
                                    double lr, double beta1, double beta2,
                                    double epsilon) {
  OptimizerState s;
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const auto &p : params) {
    s.m.emplace_back(p.numel(), 0.0);
    s.v.emplace_back(p.numel(), 0.0);
  }
  return s;
}

void adam_step(std::vector<Tensor> &params, OptimizerState &state) {
  if (state.m.size() != params.size()) {
    throw GradError("adam_step: state covers " +
                    std::to_string(state.m.size()) + " params, got " +
                    std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) {
      throw GradError("adam_step: parameter " + std::to_string(i) +
                      " has no gradient");
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto &val = params[i].mutable_value();
    const auto &g = params[i].grad();
    auto &m = state.m[i];
    auto &v = state.v[i];
    for (std::size_t j = 0; j < val.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      val[j] -= state.lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
    params[i].zero_grad();
  }
}

}  // namespace ldgen
