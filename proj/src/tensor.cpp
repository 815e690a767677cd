#include "ldgen/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace ldgen {

std::int64_t shape_numel(const Shape &s) {
  std::int64_t n = 1;
  for (auto e : s) n *= e;
  return n;
}

std::string shape_str(const Shape &s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << "x";
    os << s[i];
  }
  os << "]";
  return os.str();
}

bool same_shape(const Shape &a, const Shape &b) { return a == b; }

namespace {

NodePtr make_leaf(Shape shape, std::vector<double> data, bool requires_grad) {
  if (static_cast<std::int64_t>(data.size()) != shape_numel(shape)) {
    throw DimensionError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str(shape));
  }
  for (auto e : shape) {
    if (e <= 0) throw DimensionError("non-positive extent in " + shape_str(shape));
  }
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return n;
}

}  // namespace

Tensor Tensor::zeros(Shape shape) {
  const auto n = shape_numel(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, 0.0), false));
}

Tensor Tensor::constant(Shape shape, double v) {
  const auto n = shape_numel(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, v), false));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data) {
  return Tensor(make_leaf(std::move(shape), std::move(data), false));
}

Tensor Tensor::scalar(double v) { return from_data({1}, {v}); }

Tensor Tensor::randn(const Shape &shape, Rng &rng, double stddev) {
  std::vector<double> data(shape_numel(shape));
  for (auto &x : data) x = rng.normal() * stddev;
  return Tensor(make_leaf(shape, std::move(data), false));
}

Tensor Tensor::param(Shape shape, std::vector<double> data) {
  return Tensor(make_leaf(std::move(shape), std::move(data), true));
}

double Tensor::item() const {
  if (numel() != 1) {
    throw DimensionError("item() on non-scalar tensor of shape " +
                         shape_str(shape()));
  }
  return node_->value[0];
}

void Tensor::zero_grad() {
  node_->grad.assign(node_->value.size(), 0.0);
}

void Tensor::clear_grad() { node_->grad.clear(); }

namespace {

// Post-order over the requires_grad subgraph; result[last] == root.
std::vector<Node *> topo_order(Node *root) {
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  // Iterative DFS; the index tracks how many input edges were expanded.
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    Node *node = stack.back().first;
    const std::size_t idx = stack.back().second;
    if (idx < node->inputs.size()) {
      stack.back().second = idx + 1;
      Node *in = node->inputs[idx].get();
      if (in->requires_grad && !seen.count(in)) {
        seen.insert(in);
        stack.emplace_back(in, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

GradMap backward_collect(const Tensor &loss) {
  if (loss.numel() != 1) {
    throw DimensionError("backward: loss must be scalar, got shape " +
                         shape_str(loss.shape()));
  }
  GradMap grads;
  Node *root = loss.node();
  if (!root->requires_grad) return grads;

  std::vector<Node *> order = topo_order(root);
  grads[root] = {1.0};

  std::vector<std::vector<double> *> dins;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *node = *it;
    auto found = grads.find(node);
    if (found == grads.end()) continue;  // unreachable from the seed
    if (!node->backward_fn) continue;    // leaf
    const std::vector<double> &dout = found->second;
    dins.assign(node->inputs.size(), nullptr);
    for (std::size_t i = 0; i < node->inputs.size(); ++i) {
      Node *in = node->inputs[i].get();
      if (!in->requires_grad) continue;
      auto &buf = grads[in];
      if (buf.empty()) buf.assign(in->value.size(), 0.0);
      dins[i] = &buf;
    }
    node->backward_fn(*node, dout, dins);
  }
  return grads;
}

void backward(const Tensor &loss) {
  GradMap grads = backward_collect(loss);
  // Deterministic application order: walk the graph again rather than the
  // unordered map.
  std::unordered_set<Node *> seen;
  std::vector<Node *> stack{loss.node()};
  seen.insert(loss.node());
  while (!stack.empty()) {
    Node *node = stack.back();
    stack.pop_back();
    if (node->requires_grad && !node->backward_fn) {
      auto it = grads.find(node);
      if (it != grads.end()) {
        if (node->grad.empty()) node->grad.assign(node->value.size(), 0.0);
        for (std::size_t i = 0; i < node->grad.size(); ++i) {
          node->grad[i] += it->second[i];
        }
      }
    }
    for (const auto &in : node->inputs) {
      if (in->requires_grad && !seen.count(in.get())) {
        seen.insert(in.get());
        stack.push_back(in.get());
      }
    }
  }
}

}  // namespace ldgen
