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

#ifndef BIFORMER3D_NN_OPS_H_
#define BIFORMER3D_NN_OPS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "biformer3d/dft.h"
#include "biformer3d/nn/tape.h"

namespace biformer3d::nn {

// Additive mask applied to masked attention keys.
inline constexpr double kMaskedScore = -1e9;
inline constexpr double kLayerNormEps = 1e-5;

template <typename T> Var<T> MatMul(Var<T> a, Var<T> b);
// a * b^T
template <typename T> Var<T> MatMulNT(Var<T> a, Var<T> b);
template <typename T> Var<T> Add(Var<T> a, Var<T> b);
template <typename T> Var<T> Sub(Var<T> a, Var<T> b);
// a (R x C) + row (1 x C) broadcast over rows.
template <typename T> Var<T> AddRowBroadcast(Var<T> a, Var<T> row);
template <typename T> Var<T> Scale(Var<T> a, T factor);
template <typename T> Var<T> Hadamard(Var<T> a, Var<T> b);
template <typename T> Var<T> ConcatCols(std::span<const Var<T>> parts);
template <typename T> Var<T> ConcatCols(Var<T> a, Var<T> b);
template <typename T> Var<T> SliceCols(Var<T> a, Eigen::Index start, Eigen::Index count);
// out.row(i) = a.row(index[i]); gradients scatter-add.
template <typename T> Var<T> GatherRows(Var<T> a, std::span<const std::size_t> index);
template <typename T> Var<T> Transpose(Var<T> a);

// Exact-erf GELU, x * Phi(x).
template <typename T> Var<T> Gelu(Var<T> a);

// Row-wise (x - mean) / sqrt(max(var, eps)) * scale + shift. A constant row
// maps to `shift`.
template <typename T>
Var<T> LayerNorm(Var<T> a, Var<T> scale, Var<T> shift, double eps = kLayerNormEps);

// Row-wise softmax after adding kMaskedScore to columns with key_mask == 0.
// Throws kInvalidArgument if every key is masked.
template <typename T>
Var<T> MaskedSoftmax(Var<T> scores, std::span<const std::uint8_t> key_mask);

// Same-length convolution along the row axis with zero padding. x is
// positions x channels; kernel is channels x taps (depthwise) or 1 x taps
// (shared across channels). Odd taps only. With `residual` the input is
// added to the output.
template <typename T>
Var<T> Conv1d(Var<T> x, Var<T> kernel, bool residual = false);

// Row i from `keep` where row_mask[i] != 0, otherwise from `other`.
template <typename T>
Var<T> RowSelect(Var<T> keep, Var<T> other, std::span<const std::uint8_t> row_mask);

template <typename T> Var<T> Sum(Var<T> a);
template <typename T> Var<T> SumSquares(Var<T> a);
template <typename T> Var<T> SumAbs(Var<T> a);

// x W + b.
template <typename T> Var<T> Linear(Var<T> x, Var<T> weight, Var<T> bias);

// Orthonormal DFT of every row of x (R x K). Returns (real, imag).
template <typename T>
std::pair<Var<T>, Var<T>> DftRows(Var<T> x, const DftBasis<T>& basis);

}  // namespace biformer3d::nn

#endif  // BIFORMER3D_NN_OPS_H_
