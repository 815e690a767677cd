#include "ldgen/layers.hpp"

namespace ldgen {

Tensor init_weight(std::int64_t rows, std::int64_t cols, Rng &rng,
                   double stddev) {
  std::vector<double> data(rows * cols);
  for (auto &v : data) v = rng.normal() * stddev;
  return Tensor::param({rows, cols}, std::move(data));
}

Tensor init_bias(std::int64_t dim) {
  return Tensor::param({dim}, std::vector<double>(dim, 0.0));
}

LayerNormParams init_layer_norm(std::int64_t dim) {
  LayerNormParams p;
  p.gamma = Tensor::param({dim}, std::vector<double>(dim, 1.0));
  p.beta = Tensor::param({dim}, std::vector<double>(dim, 0.0));
  return p;
}

AttentionParams init_attention(std::int64_t dim, std::int64_t heads,
                               Rng &rng) {
  AttentionParams p;
  p.w_q = init_weight(dim, dim, rng);
  p.w_k = init_weight(dim, dim, rng);
  p.w_v = init_weight(dim, dim, rng);
  p.w_o = init_weight(dim, dim, rng);
  p.heads = heads;
  return p;
}

FeedForwardParams init_ffn(std::int64_t dim, std::int64_t hidden, Rng &rng) {
  FeedForwardParams p;
  p.w1 = init_weight(dim, hidden, rng);
  p.b1 = init_bias(hidden);
  p.w2 = init_weight(hidden, dim, rng);
  p.b2 = init_bias(dim);
  return p;
}

Tensor apply_layer_norm(const Tensor &x, const LayerNormParams &p) {
  return layer_norm(x, p.gamma, p.beta);
}

Tensor apply_ffn(const Tensor &x, const FeedForwardParams &p) {
  return add_bias(matmul(gelu(add_bias(matmul(x, p.w1), p.b1)), p.w2), p.b2);
}

void collect(NamedParams &out, const std::string &prefix,
             const LayerNormParams &p) {
  out.emplace_back(prefix + ".gamma", p.gamma);
  out.emplace_back(prefix + ".beta", p.beta);
}

void collect(NamedParams &out, const std::string &prefix,
             const AttentionParams &p) {
  out.emplace_back(prefix + ".wq", p.w_q);
  out.emplace_back(prefix + ".wk", p.w_k);
  out.emplace_back(prefix + ".wv", p.w_v);
  out.emplace_back(prefix + ".wo", p.w_o);
}

void collect(NamedParams &out, const std::string &prefix,
             const FeedForwardParams &p) {
  out.emplace_back(prefix + ".w1", p.w1);
  out.emplace_back(prefix + ".b1", p.b1);
  out.emplace_back(prefix + ".w2", p.w2);
  out.emplace_back(prefix + ".b2", p.b2);
}

std::vector<Tensor> param_tensors(const NamedParams &named) {
  std::vector<Tensor> out;
  out.reserve(named.size());
  for (const auto &[name, t] : named) out.push_back(t);
  return out;
}

std::int64_t param_count(const NamedParams &named) {
  std::int64_t n = 0;
  for (const auto &[name, t] : named) n += t.numel();
  return n;
}

}  // namespace ldgen
