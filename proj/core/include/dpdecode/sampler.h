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

// Random sampling from perturbed distributions, and decode sessions that
// charge every sampled token to a privacy account.

#ifndef DPDECODE_SAMPLER_H_
#define DPDECODE_SAMPLER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpdecode/accountant.h"
#include "dpdecode/masked_example.h"
#include "dpdecode/rng.h"
#include "dpdecode/simplex.h"

namespace dpdecode {

// Inverse-CDF draw: returns k with probability q[k]. Consumes exactly one
// Uniform01() from `rng`.
TokenId SampleToken(const PerturbedDistribution& q, Rng& rng);

struct DecodeResult {
  // Masked position -> sampled token.
  std::map<std::size_t, TokenId> filled_tokens;
  Epsilon epsilon_spent = Epsilon::Nats(0.0);
  // Set only when the session retains distributions. Publishing these
  // voids the privacy guarantee, which covers sampled tokens only.
  std::optional<std::vector<PerturbedDistribution>> per_position_distributions;
};

// Owns one privacy account and one random stream. Not safe to share across
// threads; run independent sessions with distinct seeds instead.
class DecodeSession {
 public:
  struct Options {
    bool retain_distributions = false;
  };

  static absl::StatusOr<DecodeSession> Create(Vocabulary vocab,
                                              PerturbationParams params,
                                              PrivacyAccount account,
                                              std::uint64_t seed,
                                              Options options);
  static absl::StatusOr<DecodeSession> Create(Vocabulary vocab,
                                              PerturbationParams params,
                                              PrivacyAccount account,
                                              std::uint64_t seed) {
    return Create(std::move(vocab), params, std::move(account), seed,
                  Options{});
  }

  // Perturbs and samples every masked position of `example`, one model
  // distribution per position in order. Either the whole example is decoded
  // and charged, or nothing is sampled and the account is unchanged
  // (ResourceExhausted when the example needs more tokens than remain).
  absl::StatusOr<DecodeResult> Decode(
      const MaskedExample& example,
      std::span<const Distribution> model_distributions);

  const Vocabulary& vocab() const { return vocab_; }
  const PerturbationParams& params() const { return params_; }
  const PrivacyAccount& account() const { return account_; }
  std::uint64_t seed() const { return rng_.seed(); }

 private:
  DecodeSession(Vocabulary vocab, PerturbationParams params,
                PrivacyAccount account, std::uint64_t seed, Options options)
      : vocab_(std::move(vocab)),
        params_(params),
        account_(std::move(account)),
        rng_(seed),
        options_(options) {}

  Vocabulary vocab_;
  PerturbationParams params_;
  PrivacyAccount account_;
  Rng rng_;
  Options options_;
};

}  // namespace dpdecode

#endif  // DPDECODE_SAMPLER_H_
