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

// Privacy loss of interpolate-toward-uniform decoding followed by random
// sampling. One sampled token costs ln((1 + (|V| - 1) * lambda) / (1 - lambda))
// nats and losses add linearly over the tokens predicted for an input.

#ifndef DPDECODE_ACCOUNTANT_H_
#define DPDECODE_ACCOUNTANT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace dpdecode {

// Privacy loss in nats. lambda = 1 has no finite bound; that case is carried
// as an explicit unbounded value rather than a floating-point infinity.
class Epsilon {
 public:
  static Epsilon Nats(double nats) { return Epsilon(nats, false); }
  static Epsilon Unbounded() { return Epsilon(0.0, true); }

  bool is_unbounded() const { return unbounded_; }
  // Infinity when unbounded.
  double nats() const;

  // Scales by a non-negative count. Zero predictions cost nothing, even when
  // the per-token loss is unbounded.
  Epsilon Times(double count) const;

  // 4 significant digits, or "inf".
  std::string ToString() const;

  friend bool operator==(const Epsilon&, const Epsilon&) = default;

 private:
  Epsilon(double nats, bool unbounded) : nats_(nats), unbounded_(unbounded) {}

  double nats_;
  bool unbounded_;
};

// Errors: lambda outside [0, 1] or vocab_size < 2.
absl::StatusOr<Epsilon> PerTokenEpsilon(double lambda, std::size_t vocab_size);

// t * PerTokenEpsilon(lambda, vocab_size). t < 0 is an error.
absl::StatusOr<Epsilon> SequenceEpsilon(double lambda, std::size_t vocab_size,
                                        std::int64_t t);

// Same as SequenceEpsilon but for a fractional (averaged) token count. Only
// meaningful for reporting; a session cap is always an integer.
absl::StatusOr<Epsilon> ReportedEpsilon(double lambda, std::size_t vocab_size,
                                        double avg_tokens);

// Inverse of SequenceEpsilon in lambda: with r = exp(target / t),
// lambda = (r - 1) / (r - 1 + |V|). An infinite target maps to 1.
absl::StatusOr<double> LambdaForEpsilon(double target_epsilon,
                                        std::size_t vocab_size, std::int64_t t);

// Running count of sampled tokens against a cap T. Updated functionally:
// RecordPrediction returns the next state and leaves *this untouched.
class PrivacyAccount {
 public:
  static absl::StatusOr<PrivacyAccount> Create(std::size_t vocab_size,
                                               double lambda, std::int64_t cap);

  std::size_t vocab_size() const { return vocab_size_; }
  double lambda() const { return lambda_; }
  std::int64_t cap() const { return cap_; }
  std::int64_t predictions_made() const { return predictions_made_; }
  std::int64_t remaining() const { return cap_ - predictions_made_; }
  const Epsilon& per_token_epsilon() const { return per_token_epsilon_; }
  Epsilon cumulative_epsilon() const;

  // ResourceExhausted once predictions_made == cap.
  absl::StatusOr<PrivacyAccount> RecordPrediction() const;
  // All-or-nothing variant for n predictions at once.
  absl::StatusOr<PrivacyAccount> RecordPredictions(std::int64_t n) const;

 private:
  PrivacyAccount(std::size_t vocab_size, double lambda, std::int64_t cap,
                 Epsilon per_token)
      : vocab_size_(vocab_size),
        lambda_(lambda),
        cap_(cap),
        per_token_epsilon_(per_token) {}

  std::size_t vocab_size_;
  double lambda_;
  std::int64_t cap_;
  std::int64_t predictions_made_ = 0;
  Epsilon per_token_epsilon_;
};

struct EpsilonReport {
  double lambda;
  double avg_masked_tokens;
  Epsilon avg_epsilon;
  std::vector<Epsilon> per_example_epsilons;
};

// Corpus-level loss with T set to the mean mask count per example. Also
// reports each example's own loss, which is the formal per-input guarantee.
absl::StatusOr<EpsilonReport> CorpusAverageEpsilon(
    std::span<const std::int64_t> mask_counts, double lambda,
    std::size_t vocab_size);

}  // namespace dpdecode

#endif  // DPDECODE_ACCOUNTANT_H_
