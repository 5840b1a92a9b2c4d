#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mmdec/autodiff/tensor.hpp"

namespace mmdec::autodiff {

template <typename T>
class Tape;

// Handle to a node recorded on a tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  const Tensor<T>& value() const { return tape->value(id); }
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const { return tape->requires_grad(id); }
};

// Records operations in creation order. Node ids are a topological order, so
// the backward sweep simply walks ids downwards and visits each node once.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> leaf(Tensor<T> value, bool requires_grad = false) {
    return push(std::move(value), requires_grad, nullptr);
  }

  // Used by operations. `backward` receives this tape and the node id and
  // must add the node's gradient into the gradients of its inputs.
  Var<T> push(Tensor<T> value, bool requires_grad, BackwardFn backward) {
    nodes_.push_back(Node{std::move(value), {}, requires_grad, std::move(backward)});
    return Var<T>{this, nodes_.size() - 1};
  }

  const Tensor<T>& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient buffer of a node; empty before backward() or for nodes that do
  // not require gradients.
  const std::vector<T>& grad(std::size_t id) const { return nodes_.at(id).grad; }
  std::vector<T>& grad(std::size_t id) { return nodes_.at(id).grad; }
  const std::vector<T>& grad(const Var<T>& v) const { return grad(v.id); }

  // Accumulates d(root)/d(node) into every node that requires gradients.
  // root must be a single-element tensor.
  void backward(const Var<T>& root) {
    if (value(root.id).size() != 1) {
      throw Error("backward: root must be a scalar, got shape " + shape_string(value(root.id).shape()));
    }
    for (std::size_t i = 0; i <= root.id; ++i) {
      auto& node = nodes_[i];
      if (node.requires_grad) node.grad.assign(node.value.size(), T(0));
    }
    if (!nodes_[root.id].requires_grad) return;
    nodes_[root.id].grad[0] = T(1);
    for (std::size_t i = root.id + 1; i-- > 0;) {
      auto& node = nodes_[i];
      if (node.requires_grad && node.backward) node.backward(*this, i);
    }
  }

 private:
  struct Node {
    Tensor<T> value;
    std::vector<T> grad;
    bool requires_grad;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

}  // namespace mmdec::autodiff
