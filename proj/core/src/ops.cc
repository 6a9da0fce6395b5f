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

#include "biformer3d/nn/ops.h"

#include <cmath>
#include <numbers>
#include <string>

namespace biformer3d::nn {
namespace {

[[noreturn]] void ShapeError(const std::string& op, Eigen::Index r0, Eigen::Index c0,
                             Eigen::Index r1, Eigen::Index c1) {
  throw Error(ErrorCode::kShapeMismatch,
              op + ": " + std::to_string(r0) + "x" + std::to_string(c0) + " vs " +
                  std::to_string(r1) + "x" + std::to_string(c1));
}

template <typename T>
Tape<T>& SameTape(Var<T> a, Var<T> b) {
  if (&a.tape() != &b.tape()) {
    throw Error(ErrorCode::kInvalidArgument, "operands recorded on different tapes");
  }
  return a.tape();
}

template <typename T>
void RequireSameShape(const std::string& op, Var<T> a, Var<T> b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    ShapeError(op, a.rows(), a.cols(), b.rows(), b.cols());
  }
}

template <typename T>
T GeluValue(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(1 / std::numbers::sqrt2)));
}

template <typename T>
T GeluGrad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(1 / std::numbers::sqrt2)));
  const T pdf = std::exp(T(-0.5) * x * x) * T(0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
  return cdf + x * pdf;
}

}  // namespace

template <typename T>
Var<T> MatMul(Var<T> a, Var<T> b) {
  Tape<T>& tape = SameTape(a, b);
  if (a.cols() != b.rows()) ShapeError("MatMul", a.rows(), a.cols(), b.rows(), b.cols());
  Tensor<T> out;
  out.noalias() = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record(std::move(out), a.requires_grad() || b.requires_grad(),
                     [ia, ib](Tape<T>& t, std::size_t self) {
                       const Tensor<T>& g = t.grad(self);
                       if (t.requires_grad(ia)) t.MutableGrad(ia).noalias() += g * t.value(ib).transpose();
                       if (t.requires_grad(ib)) t.MutableGrad(ib).noalias() += t.value(ia).transpose() * g;
                     });
}

template <typename T>
Var<T> MatMulNT(Var<T> a, Var<T> b) {
  Tape<T>& tape = SameTape(a, b);
  if (a.cols() != b.cols()) ShapeError("MatMulNT", a.rows(), a.cols(), b.rows(), b.cols());
  Tensor<T> out;
  out.noalias() = a.value() * b.value().transpose();
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record(std::move(out), a.requires_grad() || b.requires_grad(),
                     [ia, ib](Tape<T>& t, std::size_t self) {
                       const Tensor<T>& g = t.grad(self);
                       if (t.requires_grad(ia)) t.MutableGrad(ia).noalias() += g * t.value(ib);
                       if (t.requires_grad(ib)) t.MutableGrad(ib).noalias() += g.transpose() * t.value(ia);
                     });
}

template <typename T>
Var<T> Add(Var<T> a, Var<T> b) {
  Tape<T>& tape = SameTape(a, b);
  RequireSameShape("Add", a, b);
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record(a.value() + b.value(), a.requires_grad() || b.requires_grad(),
                     [ia, ib](Tape<T>& t, std::size_t self) {
                       if (t.requires_grad(ia)) t.MutableGrad(ia) += t.grad(self);
                       if (t.requires_grad(ib)) t.MutableGrad(ib) += t.grad(self);
                     });
}

template <typename T>
Var<T> Sub(Var<T> a, Var<T> b) {
  Tape<T>& tape = SameTape(a, b);
  RequireSameShape("Sub", a, b);
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record(a.value() - b.value(), a.requires_grad() || b.requires_grad(),
                     [ia, ib](Tape<T>& t, std::size_t self) {
                       if (t.requires_grad(ia)) t.MutableGrad(ia) += t.grad(self);
                       if (t.requires_grad(ib)) t.MutableGrad(ib) -= t.grad(self);
                     });
}

template <typename T>
Var<T> AddRowBroadcast(Var<T> a, Var<T> row) {
  Tape<T>& tape = SameTape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols()) {
    ShapeError("AddRowBroadcast", a.rows(), a.cols(), row.rows(), row.cols());
  }
  Tensor<T> out = a.value();
  out.rowwise() += row.value().row(0);
  const std::size_t ia = a.id(), ir = row.id();
  return tape.Record(std::move(out), a.requires_grad() || row.requires_grad(),
                     [ia, ir](Tape<T>& t, std::size_t self) {
                       if (t.requires_grad(ia)) t.MutableGrad(ia) += t.grad(self);
                       if (t.requires_grad(ir)) t.MutableGrad(ir) += t.grad(self).colwise().sum();
                     });
}

template <typename T>
Var<T> Scale(Var<T> a, T factor) {
  const std::size_t ia = a.id();
  return a.tape().Record(a.value() * factor, a.requires_grad(),
                         [ia, factor](Tape<T>& t, std::size_t self) {
                           t.MutableGrad(ia) += t.grad(self) * factor;
                         });
}

template <typename T>
Var<T> Hadamard(Var<T> a, Var<T> b) {
  Tape<T>& tape = SameTape(a, b);
  RequireSameShape("Hadamard", a, b);
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record(a.value().cwiseProduct(b.value()), a.requires_grad() || b.requires_grad(),
                     [ia, ib](Tape<T>& t, std::size_t self) {
                       const Tensor<T>& g = t.grad(self);
                       if (t.requires_grad(ia)) t.MutableGrad(ia) += g.cwiseProduct(t.value(ib));
                       if (t.requires_grad(ib)) t.MutableGrad(ib) += g.cwiseProduct(t.value(ia));
                     });
}

template <typename T>
Var<T> ConcatCols(std::span<const Var<T>> parts) {
  if (parts.empty()) throw Error(ErrorCode::kInvalidArgument, "ConcatCols of nothing");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  bool needs_grad = false;
  for (const Var<T>& p : parts) {
    SameTape(parts[0], p);
    if (p.rows() != rows) ShapeError("ConcatCols", rows, 0, p.rows(), p.cols());
    cols += p.cols();
    needs_grad = needs_grad || p.requires_grad();
  }
  Tensor<T> out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> offsets;
  Eigen::Index offset = 0;
  for (const Var<T>& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    ids.push_back(p.id());
    offsets.push_back(offset);
    offset += p.cols();
  }
  return parts[0].tape().Record(
      std::move(out), needs_grad, [ids, offsets](Tape<T>& t, std::size_t self) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!t.requires_grad(ids[i])) continue;
          const Eigen::Index width = t.value(ids[i]).cols();
          t.MutableGrad(ids[i]) += t.grad(self).middleCols(offsets[i], width);
        }
      });
}

template <typename T>
Var<T> ConcatCols(Var<T> a, Var<T> b) {
  const Var<T> parts[] = {a, b};
  return ConcatCols<T>(std::span<const Var<T>>(parts));
}

template <typename T>
Var<T> SliceCols(Var<T> a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    ShapeError("SliceCols", a.rows(), a.cols(), start, count);
  }
  const std::size_t ia = a.id();
  return a.tape().Record(a.value().middleCols(start, count), a.requires_grad(),
                         [ia, start, count](Tape<T>& t, std::size_t self) {
                           t.MutableGrad(ia).middleCols(start, count) += t.grad(self);
                         });
}

template <typename T>
Var<T> GatherRows(Var<T> a, std::span<const std::size_t> index) {
  Tensor<T> out(static_cast<Eigen::Index>(index.size()), a.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= static_cast<std::size_t>(a.rows())) {
      throw Error(ErrorCode::kShapeMismatch, "GatherRows index out of range");
    }
    out.row(i) = a.value().row(index[i]);
  }
  const std::size_t ia = a.id();
  std::vector<std::size_t> idx(index.begin(), index.end());
  return a.tape().Record(std::move(out), a.requires_grad(),
                         [ia, idx](Tape<T>& t, std::size_t self) {
                           Tensor<T>& ga = t.MutableGrad(ia);
                           const Tensor<T>& g = t.grad(self);
                           for (std::size_t i = 0; i < idx.size(); ++i) ga.row(idx[i]) += g.row(i);
                         });
}

template <typename T>
Var<T> Transpose(Var<T> a) {
  const std::size_t ia = a.id();
  return a.tape().Record(a.value().transpose(), a.requires_grad(),
                         [ia](Tape<T>& t, std::size_t self) {
                           t.MutableGrad(ia) += t.grad(self).transpose();
                         });
}

template <typename T>
Var<T> Gelu(Var<T> a) {
  const std::size_t ia = a.id();
  return a.tape().Record(a.value().unaryExpr([](T x) { return GeluValue(x); }), a.requires_grad(),
                         [ia](Tape<T>& t, std::size_t self) {
                           t.MutableGrad(ia) += t.grad(self).cwiseProduct(
                               t.value(ia).unaryExpr([](T x) { return GeluGrad(x); }));
                         });
}

template <typename T>
Var<T> LayerNorm(Var<T> a, Var<T> scale, Var<T> shift, double eps) {
  Tape<T>& tape = SameTape(a, scale);
  SameTape(a, shift);
  const Eigen::Index rows = a.rows(), cols = a.cols();
  if (cols < 1) throw Error(ErrorCode::kShapeMismatch, "LayerNorm over an empty axis");
  if (scale.rows() != 1 || scale.cols() != cols) ShapeError("LayerNorm scale", rows, cols, scale.rows(), scale.cols());
  if (shift.rows() != 1 || shift.cols() != cols) ShapeError("LayerNorm shift", rows, cols, shift.rows(), shift.cols());

  // normalized rows, inverse std, and whether the variance floor was active
  Tensor<T> normalized(rows, cols);
  std::vector<T> inv_std(rows);
  std::vector<std::uint8_t> floored(rows);
  const T n = static_cast<T>(cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto x = a.value().row(r);
    const T mean = x.sum() / n;
    const T var = (x.array() - mean).square().sum() / n;
    floored[r] = var < static_cast<T>(eps);
    inv_std[r] = T(1) / std::sqrt(floored[r] ? static_cast<T>(eps) : var);
    normalized.row(r) = (x.array() - mean) * inv_std[r];
  }
  Tensor<T> out = normalized.array().rowwise() * scale.value().row(0).array();
  out.rowwise() += shift.value().row(0);

  const std::size_t ia = a.id(), is = scale.id(), ib = shift.id();
  const bool needs = a.requires_grad() || scale.requires_grad() || shift.requires_grad();
  return tape.Record(
      std::move(out), needs,
      [ia, is, ib, normalized = std::move(normalized), inv_std = std::move(inv_std),
       floored = std::move(floored)](Tape<T>& t, std::size_t self) {
        const Tensor<T>& g = t.grad(self);
        if (t.requires_grad(is)) t.MutableGrad(is) += g.cwiseProduct(normalized).colwise().sum();
        if (t.requires_grad(ib)) t.MutableGrad(ib) += g.colwise().sum();
        if (!t.requires_grad(ia)) return;
        Tensor<T>& ga = t.MutableGrad(ia);
        const auto scale_row = t.value(is).row(0).array();
        const T n = static_cast<T>(g.cols());
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
          const auto gh = (g.row(r).array() * scale_row).eval();
          const T mean_gh = gh.sum() / n;
          if (floored[r]) {
            ga.row(r).array() += (gh - mean_gh) * inv_std[r];
          } else {
            const auto xh = normalized.row(r).array();
            const T mean_gx = (gh * xh).sum() / n;
            ga.row(r).array() += (gh - mean_gh - xh * mean_gx) * inv_std[r];
          }
        }
      });
}

template <typename T>
Var<T> MaskedSoftmax(Var<T> scores, std::span<const std::uint8_t> key_mask) {
  const Eigen::Index rows = scores.rows(), cols = scores.cols();
  if (static_cast<Eigen::Index>(key_mask.size()) != cols) {
    throw Error(ErrorCode::kShapeMismatch, "key mask length differs from key count");
  }
  bool any = false;
  for (std::uint8_t m : key_mask) any = any || m != 0;
  if (!any) throw Error(ErrorCode::kInvalidArgument, "every attention key is masked");

  Tensor<T> out = scores.value();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (key_mask[c] == 0) out.col(c).array() += static_cast<T>(kMaskedScore);
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    const T peak = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - peak).exp();
    out.row(r) /= out.row(r).sum();
  }
  const std::size_t is = scores.id();
  return scores.tape().Record(std::move(out), scores.requires_grad(),
                              [is](Tape<T>& t, std::size_t self) {
                                const Tensor<T>& p = t.value(self);
                                const Tensor<T>& g = t.grad(self);
                                const auto dot = g.cwiseProduct(p).rowwise().sum().eval();
                                t.MutableGrad(is).array() +=
                                    p.array() * (g.colwise() - dot.col(0)).array();
                              });
}

template <typename T>
Var<T> Conv1d(Var<T> x, Var<T> kernel, bool residual) {
  Tape<T>& tape = SameTape(x, kernel);
  const Eigen::Index length = x.rows(), channels = x.cols();
  const Eigen::Index taps = kernel.cols();
  if (taps % 2 == 0) throw Error(ErrorCode::kInvalidArgument, "Conv1d needs an odd kernel size");
  if (kernel.rows() != 1 && kernel.rows() != channels) {
    ShapeError("Conv1d kernel", length, channels, kernel.rows(), kernel.cols());
  }
  const bool shared = kernel.rows() == 1;
  const Eigen::Index half = taps / 2;
  const Tensor<T>& xv = x.value();
  const Tensor<T>& w = kernel.value();

  Tensor<T> out = residual ? xv : Tensor<T>::Zero(length, channels);
  for (Eigen::Index n = 0; n < length; ++n) {
    for (Eigen::Index j = 0; j < taps; ++j) {
      const Eigen::Index src = n + j - half;
      if (src < 0 || src >= length) continue;
      if (shared) {
        out.row(n) += w(0, j) * xv.row(src);
      } else {
        out.row(n).array() += w.col(j).transpose().array() * xv.row(src).array();
      }
    }
  }
  const std::size_t ix = x.id(), ik = kernel.id();
  return tape.Record(
      std::move(out), x.requires_grad() || kernel.requires_grad(),
      [ix, ik, taps, half, shared, residual](Tape<T>& t, std::size_t self) {
        const Tensor<T>& g = t.grad(self);
        const Tensor<T>& xv = t.value(ix);
        const Tensor<T>& w = t.value(ik);
        const Eigen::Index length = g.rows();
        if (t.requires_grad(ix)) {
          Tensor<T>& gx = t.MutableGrad(ix);
          if (residual) gx += g;
          for (Eigen::Index n = 0; n < length; ++n) {
            for (Eigen::Index j = 0; j < taps; ++j) {
              const Eigen::Index src = n + j - half;
              if (src < 0 || src >= length) continue;
              if (shared) {
                gx.row(src) += w(0, j) * g.row(n);
              } else {
                gx.row(src).array() += w.col(j).transpose().array() * g.row(n).array();
              }
            }
          }
        }
        if (t.requires_grad(ik)) {
          Tensor<T>& gw = t.MutableGrad(ik);
          for (Eigen::Index n = 0; n < length; ++n) {
            for (Eigen::Index j = 0; j < taps; ++j) {
              const Eigen::Index src = n + j - half;
              if (src < 0 || src >= length) continue;
              if (shared) {
                gw(0, j) += g.row(n).dot(xv.row(src));
              } else {
                gw.col(j) += g.row(n).cwiseProduct(xv.row(src)).transpose();
              }
            }
          }
        }
      });
}

template <typename T>
Var<T> RowSelect(Var<T> keep, Var<T> other, std::span<const std::uint8_t> row_mask) {
  Tape<T>& tape = SameTape(keep, other);
  RequireSameShape("RowSelect", keep, other);
  if (static_cast<Eigen::Index>(row_mask.size()) != keep.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "RowSelect mask length differs from row count");
  }
  Tensor<T> out = other.value();
  for (std::size_t r = 0; r < row_mask.size(); ++r) {
    if (row_mask[r] != 0) out.row(r) = keep.value().row(r);
  }
  const std::size_t ik = keep.id(), io = other.id();
  std::vector<std::uint8_t> mask(row_mask.begin(), row_mask.end());
  return tape.Record(std::move(out), keep.requires_grad() || other.requires_grad(),
                     [ik, io, mask](Tape<T>& t, std::size_t self) {
                       const Tensor<T>& g = t.grad(self);
                       for (std::size_t r = 0; r < mask.size(); ++r) {
                         const std::size_t target = mask[r] != 0 ? ik : io;
                         if (t.requires_grad(target)) t.MutableGrad(target).row(r) += g.row(r);
                       }
                     });
}

template <typename T>
Var<T> Sum(Var<T> a) {
  Tensor<T> out(1, 1);
  out(0, 0) = a.value().sum();
  const std::size_t ia = a.id();
  return a.tape().Record(std::move(out), a.requires_grad(), [ia](Tape<T>& t, std::size_t self) {
    t.MutableGrad(ia).array() += t.grad(self)(0, 0);
  });
}

template <typename T>
Var<T> SumSquares(Var<T> a) {
  Tensor<T> out(1, 1);
  out(0, 0) = a.value().squaredNorm();
  const std::size_t ia = a.id();
  return a.tape().Record(std::move(out), a.requires_grad(), [ia](Tape<T>& t, std::size_t self) {
    t.MutableGrad(ia) += (T(2) * t.grad(self)(0, 0)) * t.value(ia);
  });
}

template <typename T>
Var<T> SumAbs(Var<T> a) {
  Tensor<T> out(1, 1);
  out(0, 0) = a.value().cwiseAbs().sum();
  const std::size_t ia = a.id();
  return a.tape().Record(std::move(out), a.requires_grad(), [ia](Tape<T>& t, std::size_t self) {
    const T g = t.grad(self)(0, 0);
    t.MutableGrad(ia) += t.value(ia).unaryExpr([g](T x) { return x > 0 ? g : (x < 0 ? -g : T(0)); });
  });
}

template <typename T>
Var<T> Linear(Var<T> x, Var<T> weight, Var<T> bias) {
  return AddRowBroadcast(MatMul(x, weight), bias);
}

template <typename T>
std::pair<Var<T>, Var<T>> DftRows(Var<T> x, const DftBasis<T>& basis) {
  if (x.cols() != basis.cos_part.rows()) {
    ShapeError("DftRows", x.rows(), x.cols(), basis.cos_part.rows(), basis.cos_part.cols());
  }
  Tape<T>& tape = x.tape();
  Var<T> c = tape.Constant(basis.cos_part);
  Var<T> s = tape.Constant(basis.sin_part);
  return {MatMul(x, c), MatMul(x, s)};
}

#define BIFORMER3D_INSTANTIATE_OPS(T)                                                   \
  template Var<T> MatMul(Var<T>, Var<T>);                                               \
  template Var<T> MatMulNT(Var<T>, Var<T>);                                             \
  template Var<T> Add(Var<T>, Var<T>);                                                  \
  template Var<T> Sub(Var<T>, Var<T>);                                                  \
  template Var<T> AddRowBroadcast(Var<T>, Var<T>);                                      \
  template Var<T> Scale(Var<T>, T);                                                     \
  template Var<T> Hadamard(Var<T>, Var<T>);                                             \
  template Var<T> ConcatCols(std::span<const Var<T>>);                                  \
  template Var<T> ConcatCols(Var<T>, Var<T>);                                           \
  template Var<T> SliceCols(Var<T>, Eigen::Index, Eigen::Index);                        \
  template Var<T> GatherRows(Var<T>, std::span<const std::size_t>);                     \
  template Var<T> Transpose(Var<T>);                                                    \
  template Var<T> Gelu(Var<T>);                                                         \
  template Var<T> LayerNorm(Var<T>, Var<T>, Var<T>, double);                            \
  template Var<T> MaskedSoftmax(Var<T>, std::span<const std::uint8_t>);                 \
  template Var<T> Conv1d(Var<T>, Var<T>, bool);                                         \
  template Var<T> RowSelect(Var<T>, Var<T>, std::span<const std::uint8_t>);             \
  template Var<T> Sum(Var<T>);                                                          \
  template Var<T> SumSquares(Var<T>);                                                   \
  template Var<T> SumAbs(Var<T>);                                                       \
  template Var<T> Linear(Var<T>, Var<T>, Var<T>);                                       \
  template std::pair<Var<T>, Var<T>> DftRows(Var<T>, const DftBasis<T>&);

BIFORMER3D_INSTANTIATE_OPS(float)
BIFORMER3D_INSTANTIATE_OPS(double)

#undef BIFORMER3D_INSTANTIATE_OPS

}  // namespace biformer3d::nn
