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

#include "dpdecode/sampler.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpdecode {

TokenId SampleToken(const PerturbedDistribution& q, Rng& rng) {
  const double u = rng.Uniform01();
  std::span<const double> mass = q.mass();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    if (mass[k] <= 0.0) continue;
    cumulative += mass[k];
    last_positive = k;
    if (u < cumulative) return static_cast<TokenId>(k);
  }
  // Rounding left the total marginally below u.
  return static_cast<TokenId>(last_positive);
}

absl::StatusOr<DecodeSession> DecodeSession::Create(Vocabulary vocab,
                                                    PerturbationParams params,
                                                    PrivacyAccount account,
                                                    std::uint64_t seed,
                                                    Options options) {
  if (account.vocab_size() != vocab.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("account is for |V| = ", account.vocab_size(),
                     " but the vocabulary has ", vocab.size(), " tokens"));
  }
  if (account.lambda() != params.lambda()) {
    return absl::InvalidArgumentError(
        absl::StrCat("account lambda ", account.lambda(),
                     " differs from perturbation lambda ", params.lambda()));
  }
  return DecodeSession(std::move(vocab), params, std::move(account), seed,
                       options);
}

absl::StatusOr<DecodeResult> DecodeSession::Decode(
    const MaskedExample& example,
    std::span<const Distribution> model_distributions) {
  const std::size_t z = example.mask_count();
  if (model_distributions.size() != z) {
    return absl::InvalidArgumentError(
        absl::StrCat("example has ", z, " masked positions but ",
                     model_distributions.size(), " distributions were given"));
  }
  for (const Distribution& q : model_distributions) {
    if (q.size() != vocab_.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("distribution has ", q.size(),
                       " entries but the vocabulary has ", vocab_.size()));
    }
  }
  absl::StatusOr<PrivacyAccount> charged =
      account_.RecordPredictions(static_cast<std::int64_t>(z));
  if (!charged.ok()) return charged.status();

  DecodeResult result;
  if (options_.retain_distributions) {
    result.per_position_distributions.emplace();
    result.per_position_distributions->reserve(z);
  }
  std::span<const std::size_t> positions = example.masked_positions();
  for (std::size_t i = 0; i < z; ++i) {
    PerturbedDistribution perturbed = Perturb(model_distributions[i], params_);
    result.filled_tokens.emplace(positions[i], SampleToken(perturbed, rng_));
    if (options_.retain_distributions) {
      result.per_position_distributions->push_back(std::move(perturbed));
    }
  }
  result.epsilon_spent =
      account_.per_token_epsilon().Times(static_cast<double>(z));
  account_ = *std::move(charged);
  return result;
}

}  // namespace dpdecode
