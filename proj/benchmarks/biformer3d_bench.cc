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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "biformer3d/biformer.h"
#include "biformer3d/cues.h"
#include "biformer3d/dft.h"
#include "biformer3d/losses.h"
#include "biformer3d/sparsity.h"
#include "biformer3d/synth.h"

namespace biformer3d {
namespace {

const SyntheticSubject& DeskSubject() {
  static const SyntheticSubject subject = [] {
    CorpusSpec spec;
    spec.n_subjects = 1;
    return SynthCorpus(spec).front();
  }();
  return subject;
}

SubjectField MaskedDeskField(std::size_t m) {
  const SubjectField& f = DeskSubject().field;
  return f.WithMask(SampleSparsity(f, m, {}));
}

void BM_Forward(benchmark::State& state) {
  const BiFormer3D<float> model(ModelConfig{}, 0);
  const SubjectField field = MaskedDeskField(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(model.Forward(field));
}
BENCHMARK(BM_Forward)->Arg(5)->Arg(27)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const BiFormer3D<float> model(ModelConfig{}, 0);
  const SubjectField field = MaskedDeskField(9);
  const CueLabels labels = LabelField(DeskSubject().field);
  const DftBasis<float> basis = MakeDftBasis<float>(64);
  for (auto _ : state) {
    nn::Tape<float> tape;
    const auto bound = model.Bind(tape);
    const auto graph = model.BuildGraph(tape, bound, field);
    const auto loss = BuildLoss(graph, field, labels, CueStats{}, LossWeights{}, basis);
    tape.Backward(loss.total);
    benchmark::DoNotOptimize(model.params().CollectGradients(bound));
  }
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMillisecond);

void BM_DftOrtho(benchmark::State& state) {
  std::mt19937_64 rng(0);
  std::normal_distribution<double> n;
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (double& v : x) v = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(DftOrtho(x));
}
BENCHMARK(BM_DftOrtho)->Arg(64)->Arg(256);

void BM_EstimateItd(benchmark::State& state) {
  const BinauralHrir& h = DeskSubject().field.hrirs()[10];
  for (auto _ : state) benchmark::DoNotOptimize(EstimateItdUs(h));
}
BENCHMARK(BM_EstimateItd);

void BM_LabelField(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(LabelField(DeskSubject().field));
}
BENCHMARK(BM_LabelField)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace biformer3d

BENCHMARK_MAIN();
