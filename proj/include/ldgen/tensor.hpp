#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldgen/errors.hpp"
#include "ldgen/rng.hpp"

namespace ldgen {

using Shape = std::vector<std::int64_t>;

std::int64_t shape_numel(const Shape &s);
std::string shape_str(const Shape &s);
bool same_shape(const Shape &a, const Shape &b);

struct Node;
using NodePtr = std::shared_ptr<Node>;

// Pushes this node's output gradient into its inputs' gradient buffers.
// dins[i] is null when inputs[i] does not require grad; buffers arrive
// zero-initialized on first touch and must be accumulated into (+=).
using BackwardFn =
    std::function<void(const Node &self, const std::vector<double> &dout,
                       const std::vector<std::vector<double> *> &dins)>;

// One recorded value in a dynamic computation graph. Forward ops allocate a
// node, fill `value`, and attach the matching backward rule; `backward()`
// replays the tape in reverse topological order. A graph is confined to the
// thread that recorded it, but leaf nodes (parameters) may be shared
// read-only by graphs on other threads.
struct Node {
  Shape shape;
  std::vector<double> value;
  bool requires_grad = false;
  std::vector<double> grad;  // leaves only; sized lazily by backward()
  std::vector<NodePtr> inputs;
  BackwardFn backward_fn;

  std::int64_t numel() const { return static_cast<std::int64_t>(value.size()); }
};

// Value-like handle over a graph node. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(NodePtr n) : node_(std::move(n)) {}

  static Tensor zeros(Shape shape);
  static Tensor constant(Shape shape, double v);
  static Tensor from_data(Shape shape, std::vector<double> data);
  static Tensor scalar(double v);  // shape {1}
  static Tensor randn(const Shape &shape, Rng &rng, double stddev = 1.0);
  // Leaf with requires_grad set; the unit of trainable state.
  static Tensor param(Shape shape, std::vector<double> data);

  bool defined() const { return node_ != nullptr; }
  const Shape &shape() const { return node_->shape; }
  std::int64_t numel() const { return node_->numel(); }
  std::int64_t rows() const { return node_->shape.at(0); }
  std::int64_t cols() const { return node_->shape.at(1); }

  const std::vector<double> &value() const { return node_->value; }
  // In-place mutation is only meaningful on leaves (optimizer updates,
  // finite-difference probes); graphs recorded earlier are invalidated.
  std::vector<double> &mutable_value() { return node_->value; }

  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool v) { node_->requires_grad = v; }

  bool has_grad() const { return !node_->grad.empty(); }
  const std::vector<double> &grad() const { return node_->grad; }
  void zero_grad();   // resize to numel and fill with zeros
  void clear_grad();  // drop the buffer entirely

  Node *node() const { return node_.get(); }
  const NodePtr &node_ptr() const { return node_; }

  double at(std::int64_t i) const { return node_->value[i]; }
  double at(std::int64_t i, std::int64_t j) const {
    return node_->value[i * cols() + j];
  }

 private:
  NodePtr node_;
};

// Gradients keyed by node, as produced by one reverse sweep. Used directly
// when many per-sample graphs over shared parameters run on worker threads
// and their gradients must be reduced deterministically afterwards.
using GradMap = std::unordered_map<const Node *, std::vector<double>>;

// Reverse sweep without mutating any node: returns gradient buffers for
// every requires_grad node reachable from `loss`. Thread-safe per graph.
GradMap backward_collect(const Tensor &loss);

// Reverse sweep that accumulates into .grad of every requires_grad leaf.
// Throws DimensionError if `loss` is not scalar.
void backward(const Tensor &loss);

}  // namespace ldgen
