#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ldgen/tensor.hpp"

namespace ldgen {

// Projection matrices for one attention block; serves self-attention
// (q_in == kv_in) and cross-attention alike.
struct AttentionParams {
  Tensor w_q;  // [dim x dim]
  Tensor w_k;
  Tensor w_v;
  Tensor w_o;
  std::int64_t heads = 1;

  std::int64_t dim() const { return w_q.rows(); }
};

// ---- elementwise ----
Tensor add(const Tensor &a, const Tensor &b);
Tensor sub(const Tensor &a, const Tensor &b);
Tensor mul(const Tensor &a, const Tensor &b);
Tensor div(const Tensor &a, const Tensor &b);
Tensor neg(const Tensor &x);
Tensor mul_const(const Tensor &x, double c);
Tensor add_const(const Tensor &x, double c);
Tensor sub_from_const(double c, const Tensor &x);
Tensor sqrt_t(const Tensor &x);
Tensor gelu(const Tensor &x);
// max(x, c); gradient passes where x >= c
Tensor clamp_min(const Tensor &x, double c);
// x * s with scalar tensor s (shape {1}); the gate primitive
Tensor mul_scalar_tensor(const Tensor &x, const Tensor &s);

// ---- reductions / structure ----
Tensor sum(const Tensor &x);                       // -> {1}
Tensor row_sum(const Tensor &x);                   // [L x D] -> [L]
// mean of x[i] over rows with mask[i] != 0 -> {1}
Tensor masked_mean_rows(const Tensor &x, const std::vector<std::uint8_t> &mask);
Tensor slice_cols(const Tensor &x, std::int64_t c0, std::int64_t width);
Tensor concat_cols(const std::vector<Tensor> &parts);
// Same data, new shape; numel must match.
Tensor reshape(const Tensor &x, Shape shape);

// ---- linear algebra ----
// [m x k] * [k x n]; backward dA = dC*B^T, dB = A^T*dC
Tensor matmul(const Tensor &a, const Tensor &b);
// a[m x k] * b[n x k]^T
Tensor matmul_nt(const Tensor &a, const Tensor &b);
// x[L x d] + bias[d] broadcast over rows
Tensor add_bias(const Tensor &x, const Tensor &bias);

// ---- normalization / attention ----
// Softmax over the last dimension. A mask entry of 0 forces that position to
// exactly zero weight (additive -1e30 before the stabilized exp). Throws
// MaskError when every position is masked.
Tensor softmax_lastdim(const Tensor &x,
                       const std::vector<std::uint8_t> *mask = nullptr);

// Per-row standardization of [L x d] followed by the gamma/beta affine.
Tensor layer_norm(const Tensor &x, const Tensor &gamma, const Tensor &beta,
                  double eps = 1e-5);

// Scaled dot-product attention with `heads` heads and 1/sqrt(d/heads)
// scaling. kv_mask (length Lk) removes keys; all-masked throws MaskError.
Tensor multi_head_attention(const Tensor &q_in, const Tensor &kv_in,
                            const AttentionParams &params,
                            const std::vector<std::uint8_t> *kv_mask = nullptr);

// ---- constants ----
// Sinusoidal position table [len x dim] (no grad).
Tensor sinusoidal_positions(std::int64_t len, std::int64_t dim);
// Sinusoidal embedding of one timestep -> [dim] (no grad).
Tensor timestep_embedding(std::int64_t t, std::int64_t dim);

inline constexpr double kMaskNegInf = -1e30;

}  // namespace ldgen
