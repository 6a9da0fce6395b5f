// Copyright 2026 The BiFormer3D Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIFORMER3D_NN_TAPE_H_
#define BIFORMER3D_NN_TAPE_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "biformer3d/error.h"
#include "biformer3d/matrix.h"

namespace biformer3d::nn {

// Dense rank-2 tensor. Scalars are 1x1.
template <typename T>
using Tensor = Matrix<T>;

template <typename T>
class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape
// lives.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor<T>& value() const { return tape_->value(id_); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const { return tape_->requires_grad(id_); }

  Tape<T>& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode recording of one computation. Build a fresh tape per forward
// pass; gradients of leaves are read back after Backward().
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() {
#ifndef NDEBUG
    check_finite_ = true;
#endif
  }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> Constant(Tensor<T> value) { return Record(std::move(value), false, nullptr); }
  Var<T> Leaf(Tensor<T> value) { return Record(std::move(value), true, nullptr); }

  Var<T> Record(Tensor<T> value, bool requires_grad, BackwardFn backward) {
    if (check_finite_ && !value.allFinite()) {
      throw Error(ErrorCode::kNumeric,
                  "non-finite value at tape node " + std::to_string(nodes_.size()));
    }
    nodes_.push_back(Node{std::move(value), Tensor<T>(), requires_grad,
                          requires_grad ? std::move(backward) : BackwardFn()});
    return Var<T>(this, nodes_.size() - 1);
  }

  const Tensor<T>& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool has_grad(std::size_t id) const { return nodes_[id].grad.size() != 0; }

  // Gradient accumulated so far; empty if the node received none.
  const Tensor<T>& grad(std::size_t id) const { return nodes_[id].grad; }

  // Accumulation target for a parent's gradient, zero-initialized on first use.
  Tensor<T>& MutableGrad(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) n.grad = Tensor<T>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  void Backward(Var<T> loss) {
    if (loss.rows() != 1 || loss.cols() != 1) {
      throw Error(ErrorCode::kShapeMismatch, "Backward needs a scalar loss");
    }
    for (Node& n : nodes_) n.grad.resize(0, 0);
    if (!requires_grad(loss.id())) return;
    MutableGrad(loss.id()).setOnes();
    for (std::size_t id = loss.id() + 1; id-- > 0;) {
      Node& n = nodes_[id];
      if (n.backward && n.grad.size() != 0) n.backward(*this, id);
    }
  }

  std::size_t size() const { return nodes_.size(); }
  void set_check_finite(bool on) { check_finite_ = on; }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool check_finite_ = false;
};

}  // namespace biformer3d::nn

#endif  // BIFORMER3D_NN_TAPE_H_
