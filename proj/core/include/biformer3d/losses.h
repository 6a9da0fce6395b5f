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

#ifndef BIFORMER3D_LOSSES_H_
#define BIFORMER3D_LOSSES_H_

#include <cstdint>
#include <span>

#include "biformer3d/biformer.h"
#include "biformer3d/cues.h"
#include "biformer3d/dft.h"
#include "biformer3d/hrir.h"
#include "biformer3d/nn/tape.h"

namespace biformer3d {

struct LossWeights {
  double hrtf = 500.0;
  double itd = 0.05;
  double ild = 0.05;

  // Throws kConfig on a negative weight.
  void Validate() const;
};

struct LossReport {
  double rec = 0.0;
  double hrtf = 0.0;
  double itd = 0.0;  // standardized
  double ild = 0.0;  // standardized
  double total = 0.0;
  // Head errors in physical units, for logs.
  double itd_mae_us = 0.0;
  double ild_mae_db = 0.0;
};

// (1/N) sum over rows with mask == 0 of |pred - target|^2. Throws
// kInvalidArgument when no row is missing.
double LossRec(const StackedHrirs& pred, const StackedHrirs& target,
               std::span<const std::uint8_t> mask);

// Sum over all rows and both ears of the squared orthonormal-DFT difference.
double LossHrtf(const StackedHrirs& pred, const StackedHrirs& target);

struct CueLoss {
  double itd = 0.0;
  double ild = 0.0;
};

// Mean absolute error over missing rows; columns are (ITD, ILD).
CueLoss LossCues(const MatrixD& pred, const MatrixD& target, std::span<const std::uint8_t> mask);

// Weighted sum; `report` supplies the components.
LossReport LossTotal(LossReport report, const LossWeights& weights);

// L x 2 z-scored (ITD, ILD) targets.
template <typename T>
Matrix<T> StandardizedCueTargets(const CueLabels& labels, const CueStats& stats);

// Tape counterparts.
template <typename T>
nn::Var<T> LossRecVar(nn::Var<T> pred, nn::Var<T> target, std::span<const std::uint8_t> mask);

template <typename T>
nn::Var<T> LossHrtfVar(nn::Var<T> pred, nn::Var<T> target, const DftBasis<T>& basis);

template <typename T>
std::pair<nn::Var<T>, nn::Var<T>> LossCuesVar(nn::Var<T> pred, nn::Var<T> target,
                                              std::span<const std::uint8_t> mask);

template <typename T>
struct LossGraph {
  nn::Var<T> rec;
  nn::Var<T> hrtf;
  nn::Var<T> itd;  // invalid without cue heads
  nn::Var<T> ild;
  nn::Var<T> total;

  // Component values, plus head errors in physical units when available.
  LossReport Report(const CueStats& stats) const;
};

// Total objective for one forward graph. `field` carries the ground truth in
// every row and the mask of the sample; `labels` are per-row cue targets.
template <typename T>
LossGraph<T> BuildLoss(const ForwardGraph<T>& graph, const SubjectField& field,
                       const CueLabels& labels, const CueStats& stats,
                       const LossWeights& weights, const DftBasis<T>& basis);

}  // namespace biformer3d

#endif  // BIFORMER3D_LOSSES_H_
