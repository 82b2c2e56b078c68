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

#include "dpdecode/accountant.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpdecode/format.h"

namespace dpdecode {
namespace {

absl::Status ValidateMechanism(double lambda, std::size_t vocab_size) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must lie in [0, 1], got ", lambda));
  }
  if (vocab_size < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("vocabulary size must be at least 2, got ", vocab_size));
  }
  return absl::OkStatus();
}

}  // namespace

double Epsilon::nats() const {
  return unbounded_ ? std::numeric_limits<double>::infinity() : nats_;
}

Epsilon Epsilon::Times(double count) const {
  if (count == 0.0) return Nats(0.0);
  if (unbounded_) return Unbounded();
  return Nats(count * nats_);
}

std::string Epsilon::ToString() const {
  return unbounded_ ? "inf" : FormatSignificant(nats_, 4);
}

absl::StatusOr<Epsilon> PerTokenEpsilon(double lambda, std::size_t vocab_size) {
  if (absl::Status s = ValidateMechanism(lambda, vocab_size); !s.ok()) return s;
  if (lambda == 1.0) return Epsilon::Unbounded();
  // (1 + (|V|-1) lambda) / (1 - lambda) == 1 + |V| lambda / (1 - lambda).
  const double excess =
      static_cast<double>(vocab_size) * lambda / (1.0 - lambda);
  return Epsilon::Nats(std::log1p(excess));
}

absl::StatusOr<Epsilon> SequenceEpsilon(double lambda, std::size_t vocab_size,
                                        std::int64_t t) {
  if (t < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("token count must be non-negative, got ", t));
  }
  absl::StatusOr<Epsilon> per_token = PerTokenEpsilon(lambda, vocab_size);
  if (!per_token.ok()) return per_token.status();
  return per_token->Times(static_cast<double>(t));
}

absl::StatusOr<Epsilon> ReportedEpsilon(double lambda, std::size_t vocab_size,
                                        double avg_tokens) {
  if (!(avg_tokens >= 0.0) || std::isinf(avg_tokens)) {
    return absl::InvalidArgumentError(
        absl::StrCat("average token count must be finite and non-negative, got ",
                     avg_tokens));
  }
  absl::StatusOr<Epsilon> per_token = PerTokenEpsilon(lambda, vocab_size);
  if (!per_token.ok()) return per_token.status();
  return per_token->Times(avg_tokens);
}

absl::StatusOr<double> LambdaForEpsilon(double target_epsilon,
                                        std::size_t vocab_size,
                                        std::int64_t t) {
  if (!(target_epsilon >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("target epsilon must be non-negative, got ",
                     target_epsilon));
  }
  if (t < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("token count must be at least 1, got ", t));
  }
  if (vocab_size < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("vocabulary size must be at least 2, got ", vocab_size));
  }
  const double r_minus_one = std::expm1(target_epsilon / static_cast<double>(t));
  if (std::isinf(r_minus_one)) return 1.0;
  return r_minus_one / (r_minus_one + static_cast<double>(vocab_size));
}

absl::StatusOr<PrivacyAccount> PrivacyAccount::Create(std::size_t vocab_size,
                                                      double lambda,
                                                      std::int64_t cap) {
  if (cap < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("prediction cap must be positive, got ", cap));
  }
  absl::StatusOr<Epsilon> per_token = PerTokenEpsilon(lambda, vocab_size);
  if (!per_token.ok()) return per_token.status();
  return PrivacyAccount(vocab_size, lambda, cap, *per_token);
}

Epsilon PrivacyAccount::cumulative_epsilon() const {
  return per_token_epsilon_.Times(static_cast<double>(predictions_made_));
}

absl::StatusOr<PrivacyAccount> PrivacyAccount::RecordPrediction() const {
  return RecordPredictions(1);
}

absl::StatusOr<PrivacyAccount> PrivacyAccount::RecordPredictions(
    std::int64_t n) const {
  if (n < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("prediction count must be non-negative, got ", n));
  }
  if (n > remaining()) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "privacy budget exhausted: ", n, " prediction(s) requested, ",
        remaining(), " of ", cap_, " remaining"));
  }
  PrivacyAccount next = *this;
  next.predictions_made_ += n;
  return next;
}

absl::StatusOr<EpsilonReport> CorpusAverageEpsilon(
    std::span<const std::int64_t> mask_counts, double lambda,
    std::size_t vocab_size) {
  if (mask_counts.empty()) {
    return absl::InvalidArgumentError("corpus has no examples");
  }
  absl::StatusOr<Epsilon> per_token = PerTokenEpsilon(lambda, vocab_size);
  if (!per_token.ok()) return per_token.status();

  EpsilonReport report{.lambda = lambda,
                       .avg_masked_tokens = 0.0,
                       .avg_epsilon = Epsilon::Nats(0.0),
                       .per_example_epsilons = {}};
  report.per_example_epsilons.reserve(mask_counts.size());
  double total = 0.0;
  for (std::int64_t count : mask_counts) {
    if (count < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("mask count must be non-negative, got ", count));
    }
    total += static_cast<double>(count);
    report.per_example_epsilons.push_back(
        per_token->Times(static_cast<double>(count)));
  }
  report.avg_masked_tokens = total / static_cast<double>(mask_counts.size());
  report.avg_epsilon = per_token->Times(report.avg_masked_tokens);
  return report;
}

}  // namespace dpdecode
