#include "ldgen/losses.hpp"

#include "ldgen/ops.hpp"

namespace ldgen {

namespace {
constexpr double kNormFloor = 1e-12;
}

std::vector<std::uint8_t> shared_valid_mask(const FeatureSequence &pred,
                                            const FeatureSequence &target) {
  if (pred.length() != target.length() || pred.width() != target.width()) {
    throw DimensionError("alignment loss: pred " +
                         shape_str(pred.tokens.shape()) + " vs target " +
                         shape_str(target.tokens.shape()));
  }
  std::vector<std::uint8_t> mask(pred.mask.size(), 0);
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = pred.mask[i] && target.mask[i];
    any = any || mask[i];
  }
  if (!any) throw MaskError("alignment loss: shared mask empty");
  return mask;
}

Tensor cosine_alignment_loss(const FeatureSequence &pred,
                             const FeatureSequence &target) {
  const auto mask = shared_valid_mask(pred, target);
  Tensor dot = row_sum(mul(pred.tokens, target.tokens));
  Tensor np = sqrt_t(row_sum(mul(pred.tokens, pred.tokens)));
  Tensor nt = sqrt_t(row_sum(mul(target.tokens, target.tokens)));
  Tensor denom = clamp_min(mul(np, nt), kNormFloor);
  Tensor cos = div(dot, denom);
  return masked_mean_rows(sub_from_const(1.0, cos), mask);
}

Tensor mse_alignment_loss(const FeatureSequence &pred,
                          const FeatureSequence &target) {
  const auto mask = shared_valid_mask(pred, target);
  Tensor diff = sub(pred.tokens, target.tokens);
  Tensor per_row = row_sum(mul(diff, diff));
  Tensor mean_rows = masked_mean_rows(per_row, mask);
  return mul_const(mean_rows, 1.0 / static_cast<double>(pred.width()));
}

CombinedLoss combined_alignment_loss(const FeatureSequence &pred,
                                     const FeatureSequence &target,
                                     const AlignmentLossConfig &cfg) {
  if (!(cfg.lambda1 >= 0.0) || !(cfg.lambda2 >= 0.0) ||
      !(cfg.lambda1 + cfg.lambda2 > 0.0)) {
    throw ConfigError("alignment loss: lambda1 + lambda2 must be positive");
  }
  Tensor cos = cosine_alignment_loss(pred, target);
  Tensor mse = mse_alignment_loss(pred, target);
  Tensor total = add(mul_const(cos, cfg.lambda1), mul_const(mse, cfg.lambda2));
  CombinedLoss out;
  out.total = total;
  out.breakdown.total = total.item();
  out.breakdown.cosine_component = cos.item();
  out.breakdown.mse_component = mse.item();
  return out;
}

}  // namespace ldgen
