#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ldgen/ops.hpp"
#include "ldgen/rng.hpp"
#include "ldgen/tensor.hpp"

namespace ldgen {

using NamedParams = std::vector<std::pair<std::string, Tensor>>;

struct LayerNormParams {
  Tensor gamma;
  Tensor beta;
};

struct FeedForwardParams {
  Tensor w1;
  Tensor b1;
  Tensor w2;
  Tensor b2;
};

inline constexpr double kInitStd = 0.02;

// Seeded Gaussian weight, std 0.02 unless overridden.
Tensor init_weight(std::int64_t rows, std::int64_t cols, Rng &rng,
                   double stddev = kInitStd);
Tensor init_bias(std::int64_t dim);
LayerNormParams init_layer_norm(std::int64_t dim);
AttentionParams init_attention(std::int64_t dim, std::int64_t heads, Rng &rng);
FeedForwardParams init_ffn(std::int64_t dim, std::int64_t hidden, Rng &rng);

Tensor apply_layer_norm(const Tensor &x, const LayerNormParams &p);
// w2(gelu(w1 x + b1)) + b2
Tensor apply_ffn(const Tensor &x, const FeedForwardParams &p);

// named_parameters scaffolding
void collect(NamedParams &out, const std::string &prefix,
             const LayerNormParams &p);
void collect(NamedParams &out, const std::string &prefix,
             const AttentionParams &p);
void collect(NamedParams &out, const std::string &prefix,
             const FeedForwardParams &p);

std::vector<Tensor> param_tensors(const NamedParams &named);
std::int64_t param_count(const NamedParams &named);

}  // namespace ldgen
