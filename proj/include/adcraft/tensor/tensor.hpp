#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace adcraft::tensor {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

struct Node;
using NodePtr = std::shared_ptr<Node>;

// Storage plus autodiff bookkeeping for one tensor value.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until the first accumulation
  bool requires_grad = false;
  std::vector<NodePtr> parents;
  // Reads this node's grad and accumulates into parents' grads.
  std::function<void(Node&)> backward;
  std::size_t tape_index = 0;

  void ensure_grad();
};

// Handle with shared ownership of a Node. Copies alias the same storage,
// the way parameters are shared between a model and its optimizer.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double v, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor uniform(Shape shape, double lo, double hi, std::mt19937_64& rng,
                        bool requires_grad = true);

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t size() const { return node_->value.size(); }

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  double operator[](std::size_t i) const { return node_->value[i]; }
  double at(std::size_t row, std::size_t col) const;
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad();
  void zero_grad();

  const NodePtr& node() const { return node_; }

  // Deep copy detached from any tape.
  Tensor clone() const;

 private:
  NodePtr node_;
};

// Ordered record of the differentiable operations executed on this thread.
// Entries appear in creation order, so every entry's inputs precede it.
class Tape {
 public:
  static Tape& current();

  void record(const NodePtr& node);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  void clear() { entries_.clear(); }

  // Replays backward rules from `loss` down to the first entry, then
  // releases the recorded graph.
  void backward(const Tensor& loss);

 private:
  std::vector<NodePtr> entries_;
};

// Seeds d(loss)/d(loss) = 1 and propagates through the current tape.
// Leaf gradients accumulate on top of whatever they already hold.
void backward(const Tensor& loss);

bool grad_enabled();

// Disables recording for its lifetime (inference, finite differences).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Builds the result node and, when any input needs a gradient and recording
// is enabled, wires it onto the tape with `rule` as its backward.
Tensor make_result(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
                   std::function<void(Node&)> rule);

void zero_grads(std::span<Tensor> params);

// Global L2 norm over all populated gradients.
double grad_norm(std::span<const Tensor> params);

// Rescales gradients in place so their global norm is at most max_norm.
// Returns the norm before clipping.
double clip_grad_norm(std::span<Tensor> params, double max_norm);

}  // namespace adcraft::tensor
