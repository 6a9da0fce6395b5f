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

#ifndef BIFORMER3D_NN_ADAMW_H_
#define BIFORMER3D_NN_ADAMW_H_

#include <cstdint>

#include "biformer3d/nn/parameters.h"

namespace biformer3d::nn {

struct AdamWOptions {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

template <typename T>
struct OptimizerState {
  std::int64_t step = 0;
  Gradients<T> m;
  Gradients<T> v;
};

// Decoupled weight decay: theta <- theta (1 - lr wd), then the bias-corrected
// Adam step.
template <typename T>
class AdamW {
 public:
  AdamW(AdamWOptions options, const ParameterSet<T>& params);

  void Step(ParameterSet<T>& params, const Gradients<T>& grads);

  const AdamWOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }
  const OptimizerState<T>& state() const { return state_; }
  void set_step(std::int64_t step) { state_.step = step; }

 private:
  AdamWOptions options_;
  OptimizerState<T> state_;
};

extern template class AdamW<float>;
extern template class AdamW<double>;

}  // namespace biformer3d::nn

#endif  // BIFORMER3D_NN_ADAMW_H_
