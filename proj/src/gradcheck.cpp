#include "ldgen/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace ldgen {

namespace {

double eval_scalar(const std::function<Tensor()> &f) {
  Tensor out = f();
  const double v = out.item();
  if (!std::isfinite(v)) {
    throw std::runtime_error("grad_check: function evaluated non-finite");
  }
  return v;
}

}  // namespace

double grad_check(const std::function<Tensor()> &f,
                  const std::vector<Tensor> &params, double eps) {
  if (eps < 1e-7 || eps > 1e-3) {
    throw ConfigError("grad_check: eps must be in [1e-7, 1e-3]");
  }

  // Analytic pass.
  std::vector<Tensor> mutable_params = params;
  for (auto &p : mutable_params) p.clear_grad();
  Tensor loss = f();
  if (loss.numel() != 1) {
    throw DimensionError("grad_check: loss must be scalar");
  }
  if (!std::isfinite(loss.item())) {
    throw std::runtime_error("grad_check: function evaluated non-finite");
  }
  backward(loss);

  double worst = 0.0;
  for (auto &p : mutable_params) {
    std::vector<double> analytic =
        p.has_grad() ? p.grad() : std::vector<double>(p.numel(), 0.0);
    auto &val = p.mutable_value();
    for (std::size_t i = 0; i < val.size(); ++i) {
      const double keep = val[i];
      val[i] = keep + eps;
      const double up = eval_scalar(f);
      val[i] = keep - eps;
      const double down = eval_scalar(f);
      val[i] = keep;
      const double numeric = (up - down) / (2.0 * eps);
      const double denom =
          std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-8});
      worst = std::max(worst, std::fabs(analytic[i] - numeric) / denom);
    }
    p.clear_grad();
  }
  return worst;
}

}  // namespace ldgen
