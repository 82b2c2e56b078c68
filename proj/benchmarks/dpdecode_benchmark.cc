// Copyright 2026 The dpdecode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstddef>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "dpdecode/accountant.h"
#include "dpdecode/dp_verifier.h"
#include "dpdecode/rng.h"
#include "dpdecode/sampler.h"
#include "dpdecode/simplex.h"
#include "dpdecode/toy_mlm.h"

namespace dpdecode {
namespace {

void BM_PerturbAndSample(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Distribution q = SampleSimplex(size, rng);
  const PerturbationParams params = *PerturbationParams::Create(0.7);
  for (auto _ : state) {
    const PerturbedDistribution p = Perturb(q, params);
    benchmark::DoNotOptimize(SampleToken(p, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PerturbAndSample)->Arg(1000)->Arg(150000);

void BM_PerTokenEpsilon(benchmark::State& state) {
  double lambda = 0.0;
  for (auto _ : state) {
    lambda = lambda < 0.99 ? lambda + 1e-6 : 0.0;
    benchmark::DoNotOptimize(PerTokenEpsilon(lambda, 150000));
  }
}
BENCHMARK(BM_PerTokenEpsilon);

void BM_PredictMasked(benchmark::State& state) {
  std::string text;
  const char* words[] = {"alpha", "beta", "gamma", "delta", "epsilon",
                         "zeta", "eta", "theta"};
  Rng rng(2);
  for (int line = 0; line < 2000; ++line) {
    for (int w = 0; w < 12; ++w) {
      text += words[rng.NextU64() % 8];
      text += ' ';
    }
    text += '\n';
  }
  const Corpus corpus = *BuildVocabAndTokenize(text);
  const NGramMLM model = *NGramMLM::Train(corpus, 1);
  Rng mask_rng(3);
  const auto masked = *MaskCorpus(corpus, 0.15, mask_rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.PredictMasked(masked[i++ % masked.size()]));
  }
}
BENCHMARK(BM_PredictMasked);

void BM_MaxLikelihoodRatio(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  const auto z = static_cast<std::size_t>(state.range(1));
  Rng rng(4);
  std::vector<Distribution> a, b;
  for (std::size_t i = 0; i < z; ++i) {
    a.push_back(SampleSimplex(size, rng));
    b.push_back(SampleSimplex(size, rng));
  }
  const NeighborPair pair = *NeighborPair::Create(a, b, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(MaxLikelihoodRatio(pair));
  }
}
BENCHMARK(BM_MaxLikelihoodRatio)->Args({4, 4})->Args({8, 4});

}  // namespace
}  // namespace dpdecode

BENCHMARK_MAIN();
