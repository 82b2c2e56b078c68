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

// Utility measurement for perturbed decoding: corpus-level perplexity of the
// held-out tokens and sweeps over the interpolation weight with restarts.

#ifndef DPDECODE_EVAL_HARNESS_H_
#define DPDECODE_EVAL_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpdecode/accountant.h"
#include "dpdecode/simplex.h"
#include "dpdecode/toy_mlm.h"

namespace dpdecode {

enum class PerplexityPooling {
  // exp of the mean negative log-likelihood over every masked token.
  kTokenPooled,
  // exp of the mean over examples of each example's mean negative
  // log-likelihood. Examples with no masks are skipped.
  kExampleAveraged,
};

// exp(-(1/N) sum_i ln perturbed[i][true_tokens[i]]).
absl::StatusOr<double> Perplexity(
    std::span<const PerturbedDistribution> perturbed,
    std::span<const TokenId> true_tokens);

// Model probabilities of the held-out tokens for one masking of a corpus.
struct MaskedScores {
  // true_token_probs[e][i]: unperturbed probability of the i-th held-out token
  // of example e.
  std::vector<std::vector<double>> true_token_probs;
  std::vector<std::int64_t> mask_counts;
};

// Masks `corpus` with a fresh Rng(seed) and scores every held-out token.
absl::StatusOr<MaskedScores> ScoreMaskedCorpus(const Corpus& corpus,
                                               const NGramMLM& model,
                                               double mask_rate,
                                               std::uint64_t seed);

// Perplexity of the held-out tokens after perturbing every prediction with
// `lambda`. Errors when no token was masked.
absl::StatusOr<double> PerturbedPerplexity(const MaskedScores& scores,
                                           double lambda,
                                           std::size_t vocab_size,
                                           PerplexityPooling pooling);

struct SweepRecord {
  double lambda;
  double avg_masked_tokens;
  Epsilon avg_epsilon;
  double perplexity_mean;
  // Sample standard deviation across restarts; 0 for a single restart.
  double perplexity_std;
  int restarts;
};

struct SweepOptions {
  std::vector<double> lambdas;
  int restarts = 3;
  std::uint64_t base_seed = 0;
  double mask_rate = kDefaultMaskRate;
  PerplexityPooling pooling = PerplexityPooling::kTokenPooled;
  // Restarts run concurrently on up to this many threads; 0 picks the
  // hardware concurrency. Results do not depend on it.
  int max_threads = 0;
};

// For every lambda, averages perplexity over `restarts` maskings seeded
// base_seed + r. The same maskings are shared by all lambdas, so lambda is
// the only thing that varies within a restart. Records are ordered by lambda.
absl::StatusOr<std::vector<SweepRecord>> Sweep(const Corpus& corpus,
                                               const NGramMLM& model,
                                               const SweepOptions& options);

inline constexpr std::string_view kSweepCsvHeader =
    "lambda,avg_masked_tokens,avg_epsilon,perplexity_mean,perplexity_std,"
    "restarts";

// Header line plus one row per record, 6 significant digits, `inf` for an
// unbounded epsilon.
std::string SweepToCsv(std::span<const SweepRecord> records);

// {0, 0.1, ..., 0.9, 1}.
std::vector<double> DefaultLambdaGrid();

// Accepts "0.1,0.5,1" or an inclusive "start:stop:step" range.
absl::StatusOr<std::vector<double>> ParseLambdaGrid(std::string_view text);

}  // namespace dpdecode

#endif  // DPDECODE_EVAL_HARNESS_H_
