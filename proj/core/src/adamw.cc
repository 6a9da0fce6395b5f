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

#include "biformer3d/nn/adamw.h"

#include <cmath>

namespace biformer3d::nn {

template <typename T>
AdamW<T>::AdamW(AdamWOptions options, const ParameterSet<T>& params)
    : options_(options) {
  state_.m = ZeroGradients(params);
  state_.v = ZeroGradients(params);
}

template <typename T>
void AdamW<T>::Step(ParameterSet<T>& params, const Gradients<T>& grads) {
  if (grads.size() != params.size() || state_.m.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "AdamW: gradient count differs from parameter count");
  }
  ++state_.step;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const T correction1 = static_cast<T>(1.0 - std::pow(b1, static_cast<double>(state_.step)));
  const T correction2 = static_cast<T>(1.0 - std::pow(b2, static_cast<double>(state_.step)));
  const T lr = static_cast<T>(options_.lr);
  const T decay = static_cast<T>(1.0 - options_.lr * options_.weight_decay);
  const T eps = static_cast<T>(options_.eps);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = params[i];
    const Tensor<T>& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "AdamW: gradient shape differs for " + params.name(i));
    }
    Tensor<T>& m = state_.m[i];
    Tensor<T>& v = state_.v[i];
    m = static_cast<T>(b1) * m + static_cast<T>(1.0 - b1) * g;
    v = static_cast<T>(b2) * v + static_cast<T>(1.0 - b2) * g.cwiseProduct(g);
    if (options_.weight_decay != 0.0) p *= decay;
    p.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  }
}

template class AdamW<float>;
template class AdamW<double>;

}  // namespace biformer3d::nn
