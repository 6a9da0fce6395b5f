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

#ifndef BIFORMER3D_BIFORMER_H_
#define BIFORMER3D_BIFORMER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "biformer3d/cues.h"
#include "biformer3d/dft.h"
#include "biformer3d/hrir.h"
#include "biformer3d/model_config.h"
#include "biformer3d/nn/parameters.h"
#include "biformer3d/nn/tape.h"

namespace biformer3d {

// Graph nodes of one forward pass. Intermediate stages are in processing
// (canonical) order; `output` and `cues` are back in the field's row order.
template <typename T>
struct ForwardGraph {
  std::vector<std::size_t> order;  // processing row i = field row order[i]
  nn::Var<T> stacked;              // H_full, unmeasured rows zero
  nn::Var<T> signal_tokens;        // E
  nn::Var<T> geometry_tokens;      // P_geo
  nn::Var<T> tokens;               // O
  nn::Var<T> context;              // C
  nn::Var<T> raw;                  // H_raw
  nn::Var<T> fused;                // H_fused
  nn::Var<T> refined;              // H_hat (processing order)
  nn::Var<T> output;               // H_hat (field order)
  nn::Var<T> cues;                 // L x 2 standardized (ITD, ILD); invalid without heads
};

struct Prediction {
  StackedHrirs hrirs;
  // Heads' ITD (us) / ILD (dB), empty when the heads are disabled.
  CueLabels cues;
};

// Time-domain masked-inpainting transformer over the directions of one
// subject: signal and geometry tokens, key-masked pre-norm encoder, shared
// decoder and cue heads, masked fusion and direction-axis Conv1D refinement.
template <typename T>
class BiFormer3D {
 public:
  using Bound = std::vector<nn::Var<T>>;

  BiFormer3D(ModelConfig config, std::uint64_t seed);
  // Adopts existing parameters; names and shapes must match the config.
  BiFormer3D(ModelConfig config, nn::ParameterSet<T> params, CueStats stats);

  const ModelConfig& config() const { return config_; }
  const nn::ParameterSet<T>& params() const { return params_; }
  nn::ParameterSet<T>& mutable_params() { return params_; }
  const CueStats& cue_stats() const { return stats_; }
  void set_cue_stats(const CueStats& stats) { stats_ = stats; }

  Bound Bind(nn::Tape<T>& tape) const { return params_.Bind(tape); }
  // Parameters as constants: no gradient bookkeeping (inference).
  Bound BindConstant(nn::Tape<T>& tape) const;

  // e = LayerNorm(GELU(h~ W_s)) with h~ = mask * h.
  nn::Var<T> EncodeSignals(const Bound& p, nn::Var<T> stacked,
                           std::span<const std::uint8_t> mask) const;
  // p = LayerNorm(GELU([x, gamma(x)] W_g)).
  nn::Var<T> EncodeGeometry(const Bound& p, nn::Var<T> features) const;
  nn::Var<T> AssembleTokens(nn::Var<T> signal, nn::Var<T> geometry) const;
  nn::Var<T> TransformerEncode(const Bound& p, nn::Var<T> tokens,
                               std::span<const std::uint8_t> key_mask) const;
  nn::Var<T> Decode(const Bound& p, nn::Var<T> context) const;
  // Standardized (ITD, ILD) per row.
  nn::Var<T> PredictCues(const Bound& p, nn::Var<T> context) const;
  // Sorts rows canonically, applies the conv layers with
  // out = x + (1 - mask) * (conv(x) - x), and restores the input order.
  nn::Var<T> Refine(const Bound& p, nn::Var<T> fused, std::span<const Direction> directions,
                    std::span<const std::uint8_t> mask) const;

  // Whole pipeline on `tape`. Rows are processed in canonical order so the
  // result does not depend on the field's row order.
  ForwardGraph<T> BuildGraph(nn::Tape<T>& tape, const Bound& p,
                             const SubjectField& field) const;

  // encode -> tokens -> transformer -> decode -> fuse in the given row order,
  // no refinement.
  nn::Var<T> BuildUnrefined(nn::Tape<T>& tape, const Bound& p, const SubjectField& field) const;

  Prediction Forward(const SubjectField& field) const;

  // Un-standardizes head outputs into ITD (us) / ILD (dB).
  CueLabels CuesFromStandardized(const Matrix<T>& standardized) const;

  template <typename U>
  BiFormer3D<U> Cast() const {
    return BiFormer3D<U>(config_, params_.template Cast<U>(), stats_);
  }

 private:
  struct LayerSlots {
    std::size_t ln1_scale, ln1_shift;
    std::size_t q_w, q_b, k_w, k_b, v_w, v_b, o_w, o_b;
    std::size_t ln2_scale, ln2_shift;
    std::size_t ff1_w, ff1_b, ff2_w, ff2_b;
  };
  struct Slots {
    std::size_t signal_w, signal_ln_scale, signal_ln_shift;
    std::size_t geo_w, geo_ln_scale, geo_ln_shift;
    std::vector<LayerSlots> layers;
    std::size_t final_ln_scale = 0, final_ln_shift = 0;
    std::size_t dec1_w, dec1_b, dec2_w, dec2_b;
    std::size_t head1_w = 0, head1_b = 0, head2_w = 0, head2_b = 0;
    std::vector<std::size_t> refine;
  };

  void ResolveSlots();

  ModelConfig config_;
  nn::ParameterSet<T> params_;
  CueStats stats_;
  Slots slots_{};
};

extern template class BiFormer3D<float>;
extern template class BiFormer3D<double>;

// Geometry features in the layout the model expects.
MatrixD ModelGeometryFeatures(const ModelConfig& config, std::span<const Direction> directions);

}  // namespace biformer3d

#endif  // BIFORMER3D_BIFORMER_H_
