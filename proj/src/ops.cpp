#include "ldgen/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ldgen/kernels.hpp"

namespace ldgen {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

bool any_requires_grad(const std::vector<NodePtr> &inputs) {
  for (const auto &in : inputs) {
    if (in->requires_grad) return true;
  }
  return false;
}

Tensor make_op(Shape shape, std::vector<double> value,
               std::vector<NodePtr> inputs, BackwardFn fn) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  if (any_requires_grad(inputs)) {
    n->requires_grad = true;
    n->inputs = std::move(inputs);
    n->backward_fn = std::move(fn);
  }
  return Tensor(std::move(n));
}

void check_same_shape(const Tensor &a, const Tensor &b, const char *op) {
  if (!same_shape(a.shape(), b.shape())) {
    throw DimensionError(std::string(op) + ": shapes " + shape_str(a.shape()) +
                         " and " + shape_str(b.shape()) + " differ");
  }
}

void check_rank2(const Tensor &x, const char *op) {
  if (x.shape().size() != 2) {
    throw DimensionError(std::string(op) + ": expected rank-2 tensor, got " +
                         shape_str(x.shape()));
  }
}

void axpy(std::vector<double> &dst, double a, const std::vector<double> &x) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a * x[i];
}

}  // namespace

Tensor add(const Tensor &a, const Tensor &b) {
  check_same_shape(a, b, "add");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.value()[i] + b.value()[i];
  return make_op(a.shape(), std::move(v), {a.node_ptr(), b.node_ptr()},
                 [](const Node &, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (dins[0]) axpy(*dins[0], 1.0, dout);
                   if (dins[1]) axpy(*dins[1], 1.0, dout);
                 });
}

Tensor sub(const Tensor &a, const Tensor &b) {
  check_same_shape(a, b, "sub");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.value()[i] - b.value()[i];
  return make_op(a.shape(), std::move(v), {a.node_ptr(), b.node_ptr()},
                 [](const Node &, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (dins[0]) axpy(*dins[0], 1.0, dout);
                   if (dins[1]) axpy(*dins[1], -1.0, dout);
                 });
}

Tensor mul(const Tensor &a, const Tensor &b) {
  check_same_shape(a, b, "mul");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.value()[i] * b.value()[i];
  return make_op(a.shape(), std::move(v), {a.node_ptr(), b.node_ptr()},
                 [](const Node &self, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   const auto &av = self.inputs[0]->value;
                   const auto &bv = self.inputs[1]->value;
                   if (dins[0]) {
                     for (std::size_t i = 0; i < dout.size(); ++i)
                       (*dins[0])[i] += dout[i] * bv[i];
                   }
                   if (dins[1]) {
                     for (std::size_t i = 0; i < dout.size(); ++i)
                       (*dins[1])[i] += dout[i] * av[i];
                   }
                 });
}

Tensor div(const Tensor &a, const Tensor &b) {
  check_same_shape(a, b, "div");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.value()[i] / b.value()[i];
  return make_op(a.shape(), std::move(v), {a.node_ptr(), b.node_ptr()},
                 [](const Node &self, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   const auto &av = self.inputs[0]->value;
                   const auto &bv = self.inputs[1]->value;
                   if (dins[0]) {
                     for (std::size_t i = 0; i < dout.size(); ++i)
                       (*dins[0])[i] += dout[i] / bv[i];
                   }
                   if (dins[1]) {
                     for (std::size_t i = 0; i < dout.size(); ++i)
                       (*dins[1])[i] -= dout[i] * av[i] / (bv[i] * bv[i]);
                   }
                 });
}

Tensor neg(const Tensor &x) { return mul_const(x, -1.0); }

Tensor mul_const(const Tensor &x, double c) {
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.value()[i] * c;
  return make_op(x.shape(), std::move(v), {x.node_ptr()},
                 [c](const Node &, const std::vector<double> &dout,
                     const std::vector<std::vector<double> *> &dins) {
                   if (dins[0]) axpy(*dins[0], c, dout);
                 });
}

Tensor add_const(const Tensor &x, double c) {
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.value()[i] + c;
  return make_op(x.shape(), std::move(v), {x.node_ptr()},
                 [](const Node &, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (dins[0]) axpy(*dins[0], 1.0, dout);
                 });
}

Tensor sub_from_const(double c, const Tensor &x) {
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c - x.value()[i];
  return make_op(x.shape(), std::move(v), {x.node_ptr()},
                 [](const Node &, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (dins[0]) axpy(*dins[0], -1.0, dout);
                 });
}

Tensor sqrt_t(const Tensor &x) {
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(x.value()[i]);
  return make_op(x.shape(), std::move(v), {x.node_ptr()},
                 [](const Node &self, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (!dins[0]) return;
                   for (std::size_t i = 0; i < dout.size(); ++i) {
                     // The derivative blows up at 0; downstream guards zero
                     // the incoming grad there, so skip instead of 0 * inf.
                     if (self.value[i] > 0.0)
                       (*dins[0])[i] += dout[i] * 0.5 / self.value[i];
                   }
                 });
}

Tensor gelu(const Tensor &x) {
  // Exact erf form: x * Phi(x); smooth, so finite-difference checks are clean.
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double xi = x.value()[i];
    v[i] = xi * 0.5 * (1.0 + std::erf(xi * kInvSqrt2));
  }
  return make_op(x.shape(), std::move(v), {x.node_ptr()},
                 [](const Node &self, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (!dins[0]) return;
                   const auto &xv = self.inputs[0]->value;
                   for (std::size_t i = 0; i < dout.size(); ++i) {
                     const double xi = xv[i];
                     const double phi = 0.5 * (1.0 + std::erf(xi * kInvSqrt2));
                     const double pdf =
                         kInvSqrt2Pi * std::exp(-0.5 * xi * xi);
                     (*dins[0])[i] += dout[i] * (phi + xi * pdf);
                   }
                 });
}

Tensor clamp_min(const Tensor &x, double c) {
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(x.value()[i], c);
  return make_op(x.shape(), std::move(v), {x.node_ptr()},
                 [c](const Node &self, const std::vector<double> &dout,
                     const std::vector<std::vector<double> *> &dins) {
                   if (!dins[0]) return;
                   const auto &xv = self.inputs[0]->value;
                   for (std::size_t i = 0; i < dout.size(); ++i) {
                     if (xv[i] >= c) (*dins[0])[i] += dout[i];
                   }
                 });
}

Tensor mul_scalar_tensor(const Tensor &x, const Tensor &s) {
  if (s.numel() != 1) {
    throw DimensionError("mul_scalar_tensor: scale must be scalar, got " +
                         shape_str(s.shape()));
  }
  const double sv = s.value()[0];
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.value()[i] * sv;
  return make_op(x.shape(), std::move(v), {x.node_ptr(), s.node_ptr()},
                 [](const Node &self, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   const auto &xv = self.inputs[0]->value;
                   const double sc = self.inputs[1]->value[0];
                   if (dins[0]) axpy(*dins[0], sc, dout);
                   if (dins[1]) {
                     double acc = 0.0;
                     for (std::size_t i = 0; i < dout.size(); ++i)
                       acc += dout[i] * xv[i];
                     (*dins[1])[0] += acc;
                   }
                 });
}

Tensor sum(const Tensor &x) {
  double acc = 0.0;
  for (double v : x.value()) acc += v;
  return make_op({1}, {acc}, {x.node_ptr()},
                 [](const Node &, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (!dins[0]) return;
                   for (auto &g : *dins[0]) g += dout[0];
                 });
}

Tensor row_sum(const Tensor &x) {
  check_rank2(x, "row_sum");
  const auto rows = x.rows(), cols = x.cols();
  std::vector<double> v(rows, 0.0);
  for (std::int64_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) acc += x.value()[i * cols + j];
    v[i] = acc;
  }
  return make_op({rows}, std::move(v), {x.node_ptr()},
                 [rows, cols](const Node &, const std::vector<double> &dout,
                              const std::vector<std::vector<double> *> &dins) {
                   if (!dins[0]) return;
                   for (std::int64_t i = 0; i < rows; ++i)
                     for (std::int64_t j = 0; j < cols; ++j)
                       (*dins[0])[i * cols + j] += dout[i];
                 });
}

Tensor masked_mean_rows(const Tensor &x,
                        const std::vector<std::uint8_t> &mask) {
  if (x.shape().size() != 1) {
    throw DimensionError("masked_mean_rows: expected rank-1 tensor, got " +
                         shape_str(x.shape()));
  }
  if (static_cast<std::int64_t>(mask.size()) != x.numel()) {
    throw DimensionError("masked_mean_rows: mask length " +
                         std::to_string(mask.size()) + " vs " +
                         std::to_string(x.numel()) + " rows");
  }
  std::int64_t count = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      acc += x.value()[i];
      ++count;
    }
  }
  if (count == 0) throw MaskError("masked_mean_rows: all rows masked");
  return make_op(
      {1}, {acc / static_cast<double>(count)}, {x.node_ptr()},
      [mask, count](const Node &, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
        if (!dins[0]) return;
        const double g = dout[0] / static_cast<double>(count);
        for (std::size_t i = 0; i < mask.size(); ++i) {
          if (mask[i]) (*dins[0])[i] += g;
        }
      });
}

Tensor slice_cols(const Tensor &x, std::int64_t c0, std::int64_t width) {
  check_rank2(x, "slice_cols");
  const auto rows = x.rows(), cols = x.cols();
  if (c0 < 0 || width <= 0 || c0 + width > cols) {
    throw DimensionError("slice_cols: [" + std::to_string(c0) + ", " +
                         std::to_string(c0 + width) + ") out of " +
                         shape_str(x.shape()));
  }
  std::vector<double> v(rows * width);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < width; ++j)
      v[i * width + j] = x.value()[i * cols + c0 + j];
  return make_op(
      {rows, width}, std::move(v), {x.node_ptr()},
      [rows, cols, c0, width](const Node &, const std::vector<double> &dout,
                              const std::vector<std::vector<double> *> &dins) {
        if (!dins[0]) return;
        for (std::int64_t i = 0; i < rows; ++i)
          for (std::int64_t j = 0; j < width; ++j)
            (*dins[0])[i * cols + c0 + j] += dout[i * width + j];
      });
}

Tensor concat_cols(const std::vector<Tensor> &parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no parts");
  const auto rows = parts[0].rows();
  std::int64_t total = 0;
  std::vector<NodePtr> inputs;
  std::vector<std::int64_t> widths;
  for (const auto &p : parts) {
    check_rank2(p, "concat_cols");
    if (p.rows() != rows) {
      throw DimensionError("concat_cols: row mismatch " +
                           shape_str(parts[0].shape()) + " vs " +
                           shape_str(p.shape()));
    }
    widths.push_back(p.cols());
    total += p.cols();
    inputs.push_back(p.node_ptr());
  }
  std::vector<double> v(rows * total);
  std::int64_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto w = widths[k];
    for (std::int64_t i = 0; i < rows; ++i)
      for (std::int64_t j = 0; j < w; ++j)
        v[i * total + off + j] = parts[k].value()[i * w + j];
    off += w;
  }
  return make_op(
      {rows, total}, std::move(v), std::move(inputs),
      [rows, total, widths](const Node &, const std::vector<double> &dout,
                            const std::vector<std::vector<double> *> &dins) {
        std::int64_t off = 0;
        for (std::size_t k = 0; k < widths.size(); ++k) {
          const auto w = widths[k];
          if (dins[k]) {
            for (std::int64_t i = 0; i < rows; ++i)
              for (std::int64_t j = 0; j < w; ++j)
                (*dins[k])[i * w + j] += dout[i * total + off + j];
          }
          off += w;
        }
      });
}

Tensor reshape(const Tensor &x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: " + shape_str(x.shape()) + " to " +
                         shape_str(shape) + " changes element count");
  }
  return make_op(std::move(shape), x.value(), {x.node_ptr()},
                 [](const Node &, const std::vector<double> &dout,
                    const std::vector<std::vector<double> *> &dins) {
                   if (dins[0]) axpy(*dins[0], 1.0, dout);
                 });
}

Tensor matmul(const Tensor &a, const Tensor &b) {
  check_rank2(a, "matmul");
  check_rank2(b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()) + " inner extents disagree");
  }
  const auto m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> v(m * n, 0.0);
  kernels::mm_nn(a.value().data(), b.value().data(), v.data(), m, k, n);
  return make_op(
      {m, n}, std::move(v), {a.node_ptr(), b.node_ptr()},
      [m, k, n](const Node &self, const std::vector<double> &dout,
                const std::vector<std::vector<double> *> &dins) {
        const auto &av = self.inputs[0]->value;
        const auto &bv = self.inputs[1]->value;
        if (dins[0])  // dA = dC * B^T
          kernels::mm_nt(dout.data(), bv.data(), dins[0]->data(), m, n, k);
        if (dins[1])  // dB = A^T * dC
          kernels::mm_tn(av.data(), dout.data(), dins[1]->data(), k, m, n);
      });
}

Tensor matmul_nt(const Tensor &a, const Tensor &b) {
  check_rank2(a, "matmul_nt");
  check_rank2(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()) + "^T inner extents disagree");
  }
  const auto m = a.rows(), k = a.cols(), n = b.rows();
  std::vector<double> v(m * n, 0.0);
  kernels::mm_nt(a.value().data(), b.value().data(), v.data(), m, k, n);
  return make_op(
      {m, n}, std::move(v), {a.node_ptr(), b.node_ptr()},
      [m, k, n](const Node &self, const std::vector<double> &dout,
                const std::vector<std::vector<double> *> &dins) {
        const auto &av = self.inputs[0]->value;
        const auto &bv = self.inputs[1]->value;
        if (dins[0])  // dA = dC * B
          kernels::mm_nn(dout.data(), bv.data(), dins[0]->data(), m, n, k);
        if (dins[1])  // dB = dC^T * A
          kernels::mm_tn(dout.data(), av.data(), dins[1]->data(), n, m, k);
      });
}

Tensor add_bias(const Tensor &x, const Tensor &bias) {
  check_rank2(x, "add_bias");
  if (bias.shape().size() != 1 || bias.numel() != x.cols()) {
    throw DimensionError("add_bias: bias " + shape_str(bias.shape()) +
                         " vs input " + shape_str(x.shape()));
  }
  const auto rows = x.rows(), cols = x.cols();
  std::vector<double> v(rows * cols);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j)
      v[i * cols + j] = x.value()[i * cols + j] + bias.value()[j];
  return make_op(
      {rows, cols}, std::move(v), {x.node_ptr(), bias.node_ptr()},
      [rows, cols](const Node &, const std::vector<double> &dout,
                   const std::vector<std::vector<double> *> &dins) {
        if (dins[0]) axpy(*dins[0], 1.0, dout);
        if (dins[1]) {
          for (std::int64_t j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (std::int64_t i = 0; i < rows; ++i) acc += dout[i * cols + j];
            (*dins[1])[j] += acc;
          }
        }
      });
}

Tensor softmax_lastdim(const Tensor &x, const std::vector<std::uint8_t> *mask) {
  if (x.shape().empty()) {
    throw DimensionError("softmax_lastdim: rank-0 input");
  }
  const std::int64_t last = x.shape().back();
  const std::int64_t rows = x.numel() / last;
  if (mask) {
    if (static_cast<std::int64_t>(mask->size()) != last) {
      throw DimensionError("softmax_lastdim: mask length " +
                           std::to_string(mask->size()) + " vs last extent " +
                           std::to_string(last));
    }
    bool any = false;
    for (auto m : *mask) any = any || (m != 0);
    if (!any) throw MaskError("softmax_lastdim: every position masked");
  }

  std::vector<double> v(x.numel());
  for (std::int64_t r = 0; r < rows; ++r) {
    const double *in = x.value().data() + r * last;
    double *out = v.data() + r * last;
    double mx = -HUGE_VAL;
    for (std::int64_t j = 0; j < last; ++j) {
      const double a = (mask && !(*mask)[j]) ? in[j] + kMaskNegInf : in[j];
      mx = std::max(mx, a);
    }
    double z = 0.0;
    for (std::int64_t j = 0; j < last; ++j) {
      const double a = (mask && !(*mask)[j]) ? in[j] + kMaskNegInf : in[j];
      out[j] = std::exp(a - mx);
      z += out[j];
    }
    for (std::int64_t j = 0; j < last; ++j) out[j] /= z;
    if (mask) {
      for (std::int64_t j = 0; j < last; ++j) {
        if (!(*mask)[j]) out[j] = 0.0;
      }
    }
  }
  return make_op(
      x.shape(), std::move(v), {x.node_ptr()},
      [rows, last](const Node &self, const std::vector<double> &dout,
                   const std::vector<std::vector<double> *> &dins) {
        if (!dins[0]) return;
        const auto &p = self.value;
        for (std::int64_t r = 0; r < rows; ++r) {
          const double *pr = p.data() + r * last;
          const double *dr = dout.data() + r * last;
          double inner = 0.0;
          for (std::int64_t j = 0; j < last; ++j) inner += pr[j] * dr[j];
          double *gr = dins[0]->data() + r * last;
          for (std::int64_t j = 0; j < last; ++j)
            gr[j] += pr[j] * (dr[j] - inner);
        }
      });
}

Tensor layer_norm(const Tensor &x, const Tensor &gamma, const Tensor &beta,
                  double eps) {
  check_rank2(x, "layer_norm");
  if (eps <= 0.0) throw ConfigError("layer_norm: eps must be positive");
  const auto rows = x.rows(), cols = x.cols();
  if (gamma.numel() != cols || beta.numel() != cols) {
    throw DimensionError("layer_norm: gamma " + shape_str(gamma.shape()) +
                         " / beta " + shape_str(beta.shape()) + " vs input " +
                         shape_str(x.shape()));
  }
  std::vector<double> xhat(rows * cols);
  std::vector<double> rstd(rows);
  std::vector<double> v(rows * cols);
  for (std::int64_t i = 0; i < rows; ++i) {
    const double *in = x.value().data() + i * cols;
    double mean = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) mean += in[j];
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) {
      const double d = in[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(cols);
    const double rs = 1.0 / std::sqrt(var + eps);
    rstd[i] = rs;
    for (std::int64_t j = 0; j < cols; ++j) {
      const double h = (in[j] - mean) * rs;
      xhat[i * cols + j] = h;
      v[i * cols + j] = h * gamma.value()[j] + beta.value()[j];
    }
  }
  return make_op(
      {rows, cols}, std::move(v),
      {x.node_ptr(), gamma.node_ptr(), beta.node_ptr()},
      [rows, cols, xhat = std::move(xhat), rstd = std::move(rstd)](
          const Node &self, const std::vector<double> &dout,
          const std::vector<std::vector<double> *> &dins) {
        const auto &gv = self.inputs[1]->value;
        if (dins[1] || dins[2]) {
          for (std::int64_t j = 0; j < cols; ++j) {
            double dg = 0.0, db = 0.0;
            for (std::int64_t i = 0; i < rows; ++i) {
              dg += dout[i * cols + j] * xhat[i * cols + j];
              db += dout[i * cols + j];
            }
            if (dins[1]) (*dins[1])[j] += dg;
            if (dins[2]) (*dins[2])[j] += db;
          }
        }
        if (dins[0]) {
          for (std::int64_t i = 0; i < rows; ++i) {
            const double *dr = dout.data() + i * cols;
            const double *hr = xhat.data() + i * cols;
            double mean_h = 0.0, mean_hx = 0.0;
            for (std::int64_t j = 0; j < cols; ++j) {
              const double hg = dr[j] * gv[j];
              mean_h += hg;
              mean_hx += hg * hr[j];
            }
            mean_h /= static_cast<double>(cols);
            mean_hx /= static_cast<double>(cols);
            double *gr = dins[0]->data() + i * cols;
            for (std::int64_t j = 0; j < cols; ++j) {
              gr[j] += rstd[i] * (dr[j] * gv[j] - mean_h - hr[j] * mean_hx);
            }
          }
        }
      });
}

Tensor multi_head_attention(const Tensor &q_in, const Tensor &kv_in,
                            const AttentionParams &params,
                            const std::vector<std::uint8_t> *kv_mask) {
  check_rank2(q_in, "attention");
  check_rank2(kv_in, "attention");
  const auto dim = params.dim();
  if (q_in.cols() != dim || kv_in.cols() != dim) {
    throw DimensionError("attention: inputs " + shape_str(q_in.shape()) +
                         " / " + shape_str(kv_in.shape()) +
                         " vs projection width " + std::to_string(dim));
  }
  if (params.heads <= 0 || dim % params.heads != 0) {
    throw DimensionError("attention: heads " + std::to_string(params.heads) +
                         " must divide dim " + std::to_string(dim));
  }
  if (kv_mask) {
    if (static_cast<std::int64_t>(kv_mask->size()) != kv_in.rows()) {
      throw DimensionError("attention: mask length " +
                           std::to_string(kv_mask->size()) + " vs " +
                           std::to_string(kv_in.rows()) + " keys");
    }
    bool any = false;
    for (auto m : *kv_mask) any = any || (m != 0);
    if (!any) throw MaskError("attention: every key masked");
  }

  const std::int64_t dh = dim / params.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Tensor q = matmul(q_in, params.w_q);
  Tensor k = matmul(kv_in, params.w_k);
  Tensor v = matmul(kv_in, params.w_v);

  std::vector<Tensor> heads;
  heads.reserve(params.heads);
  for (std::int64_t h = 0; h < params.heads; ++h) {
    Tensor qh = slice_cols(q, h * dh, dh);
    Tensor kh = slice_cols(k, h * dh, dh);
    Tensor vh = slice_cols(v, h * dh, dh);
    Tensor scores = mul_const(matmul_nt(qh, kh), scale);
    Tensor probs = softmax_lastdim(scores, kv_mask);
    heads.push_back(matmul(probs, vh));
  }
  Tensor ctx = params.heads == 1 ? heads[0] : concat_cols(heads);
  return matmul(ctx, params.w_o);
}

Tensor sinusoidal_positions(std::int64_t len, std::int64_t dim) {
  std::vector<double> v(len * dim);
  const std::int64_t half = dim / 2;
  for (std::int64_t p = 0; p < len; ++p) {
    for (std::int64_t i = 0; i < half; ++i) {
      const double freq =
          std::exp(-std::log(10000.0) * static_cast<double>(i) /
                   static_cast<double>(half));
      v[p * dim + 2 * i] = std::sin(static_cast<double>(p) * freq);
      v[p * dim + 2 * i + 1] = std::cos(static_cast<double>(p) * freq);
    }
    if (dim % 2 != 0) {
      v[p * dim + dim - 1] = 0.0;
    }
  }
  return Tensor::from_data({len, dim}, std::move(v));
}

Tensor timestep_embedding(std::int64_t t, std::int64_t dim) {
  std::vector<double> v(dim, 0.0);
  const std::int64_t half = dim / 2;
  for (std::int64_t i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) /
                                 static_cast<double>(half));
    v[2 * i] = std::sin(static_cast<double>(t) * freq);
    v[2 * i + 1] = std::cos(static_cast<double>(t) * freq);
  }
  return Tensor::from_data({dim}, std::move(v));
}

}  // namespace ldgen
