#pragma once

#include "ldgen/features.hpp"
#include "ldgen/tensor.hpp"

namespace ldgen {

struct AlignmentLossConfig {
  double lambda1 = 1.0;  // cosine weight
  double lambda2 = 1.0;  // MSE weight
};

struct LossBreakdown {
  double total = 0.0;
  double cosine_component = 0.0;
  double mse_component = 0.0;
};

// Scalar loss still attached to the graph, plus the detached component
// values for logging.
struct CombinedLoss {
  Tensor total;
  LossBreakdown breakdown;
};

// Mean over valid positions of (1 - cos(pred_i, target_i)). Validity is the
// AND of both masks; zero-norm rows fall back to a 1e-12 denominator.
Tensor cosine_alignment_loss(const FeatureSequence &pred,
                             const FeatureSequence &target);

// Mean squared difference over valid positions and channels.
Tensor mse_alignment_loss(const FeatureSequence &pred,
                          const FeatureSequence &target);

// lambda1 * cosine + lambda2 * mse, each component computed once.
CombinedLoss combined_alignment_loss(const FeatureSequence &pred,
                                     const FeatureSequence &target,
                                     const AlignmentLossConfig &cfg);

// Shared validity mask (AND); throws MaskError when empty, DimensionError
// when shapes disagree.
std::vector<std::uint8_t> shared_valid_mask(const FeatureSequence &pred,
                                            const FeatureSequence &target);

}  // namespace ldgen
