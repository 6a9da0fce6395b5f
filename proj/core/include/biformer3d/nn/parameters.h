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

#ifndef BIFORMER3D_NN_PARAMETERS_H_
#define BIFORMER3D_NN_PARAMETERS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "biformer3d/nn/tape.h"

namespace biformer3d::nn {

template <typename T>
using Gradients = std::vector<Tensor<T>>;

// Ordered, named collection of learnable tensors. Order is the checkpoint
// order.
template <typename T>
class ParameterSet {
 public:
  std::size_t Add(std::string name, Tensor<T> value) {
    for (const std::string& existing : names_) {
      if (existing == name) throw Error(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
    }
    names_.push_back(std::move(name));
    values_.push_back(std::move(value));
    return values_.size() - 1;
  }

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Tensor<T>& operator[](std::size_t i) { return values_[i]; }
  const Tensor<T>& operator[](std::size_t i) const { return values_[i]; }

  std::optional<std::size_t> Find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t ScalarCount() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
    return n;
  }

  // Records every parameter as a gradient-carrying leaf.
  std::vector<Var<T>> Bind(Tape<T>& tape) const {
    std::vector<Var<T>> vars;
    vars.reserve(values_.size());
    for (const auto& v : values_) vars.push_back(tape.Leaf(v));
    return vars;
  }

  // Gradients of bound leaves after Backward(); parameters the loss does not
  // reach get zeros.
  Gradients<T> CollectGradients(const std::vector<Var<T>>& bound) const {
    Gradients<T> grads;
    grads.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const Tape<T>& tape = bound[i].tape();
      if (tape.has_grad(bound[i].id())) {
        grads.push_back(tape.grad(bound[i].id()));
      } else {
        grads.push_back(Tensor<T>::Zero(values_[i].rows(), values_[i].cols()));
      }
    }
    return grads;
  }

  template <typename U>
  ParameterSet<U> Cast() const {
    ParameterSet<U> out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      out.Add(names_[i], values_[i].template cast<U>());
    }
    return out;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Tensor<T>> values_;
};

template <typename T>
Gradients<T> ZeroGradients(const ParameterSet<T>& params) {
  Gradients<T> g;
  for (std::size_t i = 0; i < params.size(); ++i) {
    g.push_back(Tensor<T>::Zero(params[i].rows(), params[i].cols()));
  }
  return g;
}

}  // namespace biformer3d::nn

#endif  // BIFORMER3D_NN_PARAMETERS_H_
