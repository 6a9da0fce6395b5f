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

#include "biformer3d/biformer.h"

#include <cmath>
#include <random>
#include <string>

#include "biformer3d/encoding.h"
#include "biformer3d/error.h"
#include "biformer3d/nn/ops.h"

namespace biformer3d {
namespace {

enum class InitKind { kFanIn, kZero, kOne, kIdentityTap };

struct ParamSpec {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
  InitKind init;
};

std::vector<ParamSpec> ParameterSpecs(const ModelConfig& c) {
  const auto k2 = static_cast<Eigen::Index>(2 * c.hrir_length);
  const auto d = static_cast<Eigen::Index>(c.width);
  const auto ds = static_cast<Eigen::Index>(c.signal_width());
  const auto geo = static_cast<Eigen::Index>(GeometryFeatureWidth(c.encoding()));
  const auto ff = static_cast<Eigen::Index>(c.ff_width);
  const auto dec = static_cast<Eigen::Index>(c.decoder_hidden);
  const auto head = static_cast<Eigen::Index>(c.head_hidden);

  std::vector<ParamSpec> specs;
  auto linear = [&](const std::string& name, Eigen::Index in, Eigen::Index out) {
    specs.push_back({name + ".weight", in, out, InitKind::kFanIn});
    specs.push_back({name + ".bias", 1, out, InitKind::kZero});
  };
  auto norm = [&](const std::string& name, Eigen::Index width) {
    specs.push_back({name + ".scale", 1, width, InitKind::kOne});
    specs.push_back({name + ".shift", 1, width, InitKind::kZero});
  };

  specs.push_back({"signal.weight", k2, ds, InitKind::kFanIn});
  norm("signal.ln", ds);
  specs.push_back({"geometry.weight", geo, ds, InitKind::kFanIn});
  norm("geometry.ln", ds);
  for (std::size_t i = 0; i < c.layers; ++i) {
    const std::string prefix = "layers." + std::to_string(i);
    norm(prefix + ".ln1", d);
    linear(prefix + ".attn.q", d, d);
    linear(prefix + ".attn.k", d, d);
    linear(prefix + ".attn.v", d, d);
    linear(prefix + ".attn.o", d, d);
    norm(prefix + ".ln2", d);
    linear(prefix + ".ff1", d, ff);
    linear(prefix + ".ff2", ff, d);
  }
  if (c.final_norm) norm("final_ln", d);
  linear("decoder.fc1", d, dec);
  linear("decoder.fc2", dec, k2);
  if (c.use_cue_heads) {
    linear("heads.fc1", d, head);
    linear("heads.fc2", head, 2);
  }
  if (c.use_refine) {
    for (std::size_t j = 0; j < c.refine_layers; ++j) {
      specs.push_back({"refine." + std::to_string(j) + ".kernel", k2,
                       static_cast<Eigen::Index>(c.conv_kernel), InitKind::kIdentityTap});
    }
  }
  return specs;
}

std::vector<std::size_t> InversePermutation(const std::vector<std::size_t>& order) {
  std::vector<std::size_t> inverse(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inverse[order[i]] = i;
  return inverse;
}

template <typename V>
std::vector<V> Permute(const std::vector<V>& values, const std::vector<std::size_t>& order) {
  std::vector<V> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(values[i]);
  return out;
}

}  // namespace

MatrixD ModelGeometryFeatures(const ModelConfig& config, std::span<const Direction> directions) {
  return GeometryFeatureMatrix(directions, config.encoding());
}

template <typename T>
BiFormer3D<T>::BiFormer3D(ModelConfig config, std::uint64_t seed) : config_(config) {
  config_.Validate();
  std::mt19937_64 rng(seed);
  for (const ParamSpec& spec : ParameterSpecs(config_)) {
    nn::Tensor<T> value(spec.rows, spec.cols);
    switch (spec.init) {
      case InitKind::kFanIn: {
        const double bound = 1.0 / std::sqrt(static_cast<double>(spec.rows));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index i = 0; i < value.size(); ++i) value.data()[i] = static_cast<T>(dist(rng));
        break;
      }
      case InitKind::kZero:
        value.setZero();
        break;
      case InitKind::kOne:
        value.setOnes();
        break;
      case InitKind::kIdentityTap:
        value.setZero();
        value.col(spec.cols / 2).setOnes();
        break;
    }
    params_.Add(spec.name, std::move(value));
  }
  ResolveSlots();
}

template <typename T>
BiFormer3D<T>::BiFormer3D(ModelConfig config, nn::ParameterSet<T> params, CueStats stats)
    : config_(config), params_(std::move(params)), stats_(stats) {
  config_.Validate();
  const auto specs = ParameterSpecs(config_);
  if (specs.size() != params_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(specs.size()) + " parameters, got " +
                    std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (params_.name(i) != specs[i].name || params_[i].rows() != specs[i].rows ||
        params_[i].cols() != specs[i].cols) {
      throw Error(ErrorCode::kShapeMismatch, "parameter " + std::to_string(i) + " ('" +
                                                 params_.name(i) + "') does not match '" +
                                                 specs[i].name + "'");
    }
  }
  ResolveSlots();
}

template <typename T>
void BiFormer3D<T>::ResolveSlots() {
  auto slot = [&](const std::string& name) {
    const auto idx = params_.Find(name);
    if (!idx) throw Error(ErrorCode::kShapeMismatch, "missing parameter " + name);
    return *idx;
  };
  slots_.signal_w = slot("signal.weight");
  slots_.signal_ln_scale = slot("signal.ln.scale");
  slots_.signal_ln_shift = slot("signal.ln.shift");
  slots_.geo_w = slot("geometry.weight");
  slots_.geo_ln_scale = slot("geometry.ln.scale");
  slots_.geo_ln_shift = slot("geometry.ln.shift");
  slots_.layers.clear();
  for (std::size_t i = 0; i < config_.layers; ++i) {
    const std::string p = "layers." + std::to_string(i);
    slots_.layers.push_back(LayerSlots{
        slot(p + ".ln1.scale"), slot(p + ".ln1.shift"), slot(p + ".attn.q.weight"),
        slot(p + ".attn.q.bias"), slot(p + ".attn.k.weight"), slot(p + ".attn.k.bias"),
        slot(p + ".attn.v.weight"), slot(p + ".attn.v.bias"), slot(p + ".attn.o.weight"),
        slot(p + ".attn.o.bias"), slot(p + ".ln2.scale"), slot(p + ".ln2.shift"),
        slot(p + ".ff1.weight"), slot(p + ".ff1.bias"), slot(p + ".ff2.weight"),
        slot(p + ".ff2.bias")});
  }
  if (config_.final_norm) {
    slots_.final_ln_scale = slot("final_ln.scale");
    slots_.final_ln_shift = slot("final_ln.shift");
  }
  slots_.dec1_w = slot("decoder.fc1.weight");
  slots_.dec1_b = slot("decoder.fc1.bias");
  slots_.dec2_w = slot("decoder.fc2.weight");
  slots_.dec2_b = slot("decoder.fc2.bias");
  if (config_.use_cue_heads) {
    slots_.head1_w = slot("heads.fc1.weight");
    slots_.head1_b = slot("heads.fc1.bias");
    slots_.head2_w = slot("heads.fc2.weight");
    slots_.head2_b = slot("heads.fc2.bias");
  }
  slots_.refine.clear();
  if (config_.use_refine) {
    for (std::size_t j = 0; j < config_.refine_layers; ++j) {
      slots_.refine.push_back(slot("refine." + std::to_string(j) + ".kernel"));
    }
  }
}

template <typename T>
typename BiFormer3D<T>::Bound BiFormer3D<T>::BindConstant(nn::Tape<T>& tape) const {
  Bound vars;
  vars.reserve(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) vars.push_back(tape.Constant(params_[i]));
  return vars;
}

template <typename T>
nn::Var<T> BiFormer3D<T>::EncodeSignals(const Bound& p, nn::Var<T> stacked,
                                        std::span<const std::uint8_t> mask) const {
  if (stacked.cols() != static_cast<Eigen::Index>(2 * config_.hrir_length)) {
    throw Error(ErrorCode::kShapeMismatch, "stacked HRIR width " + std::to_string(stacked.cols()) +
                                               " != 2K");
  }
  nn::Var<T> zeros = stacked.tape().Constant(nn::Tensor<T>::Zero(stacked.rows(), stacked.cols()));
  nn::Var<T> masked = nn::RowSelect(stacked, zeros, mask);
  return nn::LayerNorm(nn::Gelu(nn::MatMul(masked, p[slots_.signal_w])),
                       p[slots_.signal_ln_scale], p[slots_.signal_ln_shift]);
}

template <typename T>
nn::Var<T> BiFormer3D<T>::EncodeGeometry(const Bound& p, nn::Var<T> features) const {
  return GeoProject(features, p[slots_.geo_w], p[slots_.geo_ln_scale], p[slots_.geo_ln_shift]);
}

template <typename T>
nn::Var<T> BiFormer3D<T>::AssembleTokens(nn::Var<T> signal, nn::Var<T> geometry) const {
  const auto half = static_cast<Eigen::Index>(config_.signal_width());
  if (signal.cols() != half || geometry.cols() != half || signal.rows() != geometry.rows()) {
    throw Error(ErrorCode::kShapeMismatch, std::string("token halves do not fit ") +
                                               TokenModeName(config_.token_mode) + " mode");
  }
  if (config_.token_mode == TokenMode::kConcat) return nn::ConcatCols(signal, geometry);
  return nn::Add(signal, geometry);
}

template <typename T>
nn::Var<T> BiFormer3D<T>::TransformerEncode(const Bound& p, nn::Var<T> tokens,
                                            std::span<const std::uint8_t> key_mask) const {
  const auto d = static_cast<Eigen::Index>(config_.width);
  if (tokens.cols() != d) throw Error(ErrorCode::kShapeMismatch, "token width != D");
  const auto dh = d / static_cast<Eigen::Index>(config_.heads);
  const T inv_sqrt_dh = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  nn::Var<T> x = tokens;
  for (const LayerSlots& s : slots_.layers) {
    nn::Var<T> h = nn::LayerNorm(x, p[s.ln1_scale], p[s.ln1_shift]);
    nn::Var<T> q = nn::Linear(h, p[s.q_w], p[s.q_b]);
    nn::Var<T> k = nn::Linear(h, p[s.k_w], p[s.k_b]);
    nn::Var<T> v = nn::Linear(h, p[s.v_w], p[s.v_b]);
    std::vector<nn::Var<T>> heads;
    heads.reserve(config_.heads);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(config_.heads); ++i) {
      nn::Var<T> scores = nn::Scale(
          nn::MatMulNT(nn::SliceCols(q, i * dh, dh), nn::SliceCols(k, i * dh, dh)), inv_sqrt_dh);
      nn::Var<T> weights = nn::MaskedSoftmax(scores, key_mask);
      heads.push_back(nn::MatMul(weights, nn::SliceCols(v, i * dh, dh)));
    }
    nn::Var<T> attended = nn::ConcatCols<T>(std::span<const nn::Var<T>>(heads));
    x = nn::Add(x, nn::Linear(attended, p[s.o_w], p[s.o_b]));

    nn::Var<T> h2 = nn::LayerNorm(x, p[s.ln2_scale], p[s.ln2_shift]);
    nn::Var<T> ff = nn::Linear(nn::Gelu(nn::Linear(h2, p[s.ff1_w], p[s.ff1_b])), p[s.ff2_w],
                               p[s.ff2_b]);
    x = nn::Add(x, ff);
  }
  if (config_.final_norm) x = nn::LayerNorm(x, p[slots_.final_ln_scale], p[slots_.final_ln_shift]);
  return x;
}

template <typename T>
nn::Var<T> BiFormer3D<T>::Decode(const Bound& p, nn::Var<T> context) const {
  nn::Var<T> hidden = nn::Gelu(nn::Linear(context, p[slots_.dec1_w], p[slots_.dec1_b]));
  return nn::Linear(hidden, p[slots_.dec2_w], p[slots_.dec2_b]);
}

template <typename T>
nn::Var<T> BiFormer3D<T>::PredictCues(const Bound& p, nn::Var<T> context) const {
  if (!config_.use_cue_heads) throw Error(ErrorCode::kInvalidArgument, "cue heads are disabled");
  nn::Var<T> hidden = nn::Gelu(nn::Linear(context, p[slots_.head1_w], p[slots_.head1_b]));
  return nn::Linear(hidden, p[slots_.head2_w], p[slots_.head2_b]);
}

template <typename T>
nn::Var<T> BiFormer3D<T>::Refine(const Bound& p, nn::Var<T> fused,
                                 std::span<const Direction> directions,
                                 std::span<const std::uint8_t> mask) const {
  if (static_cast<Eigen::Index>(directions.size()) != fused.rows() ||
      mask.size() != directions.size()) {
    throw Error(ErrorCode::kShapeMismatch, "refine: directions/mask do not match rows");
  }
  const std::vector<std::size_t> order = CanonicalOrder(directions);
  const std::vector<std::size_t> inverse = InversePermutation(order);
  std::vector<std::uint8_t> sorted_mask;
  sorted_mask.reserve(order.size());
  for (std::size_t i : order) sorted_mask.push_back(mask[i]);

  nn::Var<T> x = nn::GatherRows<T>(fused, order);
  for (std::size_t slot : slots_.refine) {
    // Measured rows keep x; the others take the convolved rows.
    x = nn::RowSelect(x, nn::Conv1d(x, p[slot]), sorted_mask);
  }
  return nn::GatherRows<T>(x, inverse);
}

template <typename T>
ForwardGraph<T> BiFormer3D<T>::BuildGraph(nn::Tape<T>& tape, const Bound& p,
                                          const SubjectField& field) const {
  if (field.hrir_length() != config_.hrir_length) {
    throw Error(ErrorCode::kShapeMismatch, "field K=" + std::to_string(field.hrir_length()) +
                                               " but model K=" +
                                               std::to_string(config_.hrir_length));
  }
  ForwardGraph<T> g;
  g.order = CanonicalOrder(field.directions());
  const std::vector<std::size_t> inverse = InversePermutation(g.order);
  const std::vector<Direction> directions = Permute(field.directions(), g.order);
  const std::vector<std::uint8_t> mask = Permute(field.mask(), g.order);

  const StackedHrirs stacked = StackField(field);
  nn::Tensor<T> sorted(stacked.rows(), stacked.cols());
  for (std::size_t i = 0; i < g.order.size(); ++i) {
    sorted.row(i) = stacked.row(g.order[i]).template cast<T>();
  }
  g.stacked = tape.Constant(std::move(sorted));
  g.signal_tokens = EncodeSignals(p, g.stacked, mask);
  g.geometry_tokens = EncodeGeometry(
      p, tape.Constant(ModelGeometryFeatures(config_, directions).template cast<T>()));
  g.tokens = AssembleTokens(g.signal_tokens, g.geometry_tokens);
  g.context = TransformerEncode(p, g.tokens, mask);
  g.raw = Decode(p, g.context);
  g.fused = nn::RowSelect(g.stacked, g.raw, mask);
  g.refined = config_.use_refine ? Refine(p, g.fused, directions, mask) : g.fused;
  g.output = nn::GatherRows<T>(g.refined, inverse);
  if (config_.use_cue_heads) g.cues = nn::GatherRows<T>(PredictCues(p, g.context), inverse);
  return g;
}

template <typename T>
nn::Var<T> BiFormer3D<T>::BuildUnrefined(nn::Tape<T>& tape, const Bound& p,
                                         const SubjectField& field) const {
  nn::Var<T> stacked = tape.Constant(StackField(field).template cast<T>());
  nn::Var<T> e = EncodeSignals(p, stacked, field.mask());
  nn::Var<T> geo = EncodeGeometry(
      p, tape.Constant(ModelGeometryFeatures(config_, field.directions()).template cast<T>()));
  nn::Var<T> context = TransformerEncode(p, AssembleTokens(e, geo), field.mask());
  return nn::RowSelect(stacked, Decode(p, context), field.mask());
}

template <typename T>
CueLabels BiFormer3D<T>::CuesFromStandardized(const Matrix<T>& standardized) const {
  CueLabels cues;
  for (Eigen::Index r = 0; r < standardized.rows(); ++r) {
    cues.itd_us.push_back(static_cast<double>(standardized(r, 0)) * stats_.itd_std_us +
                          stats_.itd_mean_us);
    cues.ild_db.push_back(static_cast<double>(standardized(r, 1)) * stats_.ild_std_db +
                          stats_.ild_mean_db);
  }
  return cues;
}

template <typename T>
Prediction BiFormer3D<T>::Forward(const SubjectField& field) const {
  nn::Tape<T> tape;
  const Bound p = BindConstant(tape);
  const ForwardGraph<T> g = BuildGraph(tape, p, field);
  Prediction out;
  out.hrirs = g.output.value().template cast<double>();
  if (g.cues.valid()) out.cues = CuesFromStandardized(g.cues.value());
  return out;
}

template class BiFormer3D<float>;
template class BiFormer3D<double>;

}  // namespace biformer3d
