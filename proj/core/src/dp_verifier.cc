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

#include "dpdecode/dp_verifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpdecode/accountant.h"

namespace dpdecode {
namespace {

absl::Status CheckInstanceSize(std::size_t vocab_size, std::size_t z) {
  if (vocab_size > kMaxVerifierVocab || z > kMaxVerifierPositions) {
    return absl::OutOfRangeError(absl::StrCat(
        "instance too large for exhaustive enumeration: |V| = ", vocab_size,
        ", z = ", z, " (limits ", kMaxVerifierVocab, " and ",
        kMaxVerifierPositions, ")"));
  }
  return absl::OkStatus();
}

absl::Status CheckLambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "verification needs lambda in [0, 1), got ", lambda));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<NeighborPair> NeighborPair::Create(std::vector<Distribution> a,
                                                  std::vector<Distribution> b,
                                                  double lambda) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "inputs have ", a.size(), " and ", b.size(), " masked positions"));
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must lie in [0, 1], got ", lambda));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != a[0].size() || b[i].size() != a[0].size()) {
      return absl::InvalidArgumentError(
          "all distributions must share one vocabulary");
    }
  }
  return NeighborPair(std::move(a), std::move(b), lambda);
}

std::size_t NeighborPair::vocab_size() const {
  return a_.empty() ? 0 : a_[0].size();
}

absl::StatusOr<double> OutputProbability(
    std::span<const Distribution> distributions, double lambda,
    std::span<const TokenId> y) {
  if (y.size() != distributions.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("output has ", y.size(), " tokens for ",
                     distributions.size(), " masked positions"));
  }
  double p = 1.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Distribution& q = distributions[i];
    if (y[i] < 0 || static_cast<std::size_t>(y[i]) >= q.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("token id ", y[i], " outside the vocabulary"));
    }
    p *= lambda * q[y[i]] + (1.0 - lambda) / static_cast<double>(q.size());
  }
  return p;
}

absl::StatusOr<RatioReport> MaxLikelihoodRatio(const NeighborPair& pair) {
  const std::size_t v = pair.vocab_size();
  const std::size_t z = pair.positions();
  if (absl::Status s = CheckLambda(pair.lambda()); !s.ok()) return s;
  if (absl::Status s = CheckInstanceSize(v, z); !s.ok()) return s;

  RatioReport report{.max_log_ratio = 0.0,
                     .theoretical_bound = 0.0,
                     .argmax_sequence = {},
                     .tight = false};
  if (z > 0) {
    absl::StatusOr<Epsilon> bound =
        SequenceEpsilon(pair.lambda(), v, static_cast<std::int64_t>(z));
    if (!bound.ok()) return bound.status();
    report.theoretical_bound = bound->nats();
  }

  // log_ratio[i][k] = ln Pr_a[t_i = k] - ln Pr_b[t_i = k].
  std::vector<std::vector<double>> log_ratio(z, std::vector<double>(v));
  const double lambda = pair.lambda();
  for (std::size_t i = 0; i < z; ++i) {
    for (std::size_t k = 0; k < v; ++k) {
      log_ratio[i][k] =
          std::log(PerturbedMass(pair.distributions_a()[i][k], lambda, v)) -
          std::log(PerturbedMass(pair.distributions_b()[i][k], lambda, v));
    }
  }

  // Odometer over all |V|^z outputs.
  std::vector<TokenId> y(z, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    double s = 0.0;
    for (std::size_t i = 0; i < z; ++i) s += log_ratio[i][y[i]];
    if (s > best) {
      best = s;
      report.argmax_sequence = y;
    }
    std::size_t i = 0;
    while (i < z && static_cast<std::size_t>(++y[i]) == v) y[i++] = 0;
    if (i == z) break;
  }
  report.max_log_ratio = best;
  report.tight =
      report.theoretical_bound - report.max_log_ratio < kVerifierTolerance;
  return report;
}

Distribution SampleSimplex(std::size_t size, Rng& rng) {
  std::vector<double> mass(size);
  double total = 0.0;
  for (double& m : mass) {
    m = rng.Exponential();
    total += m;
  }
  if (total == 0.0) return Distribution::Uniform(size);
  for (double& m : mass) m /= total;
  return *Distribution::Create(std::move(mass));
}

absl::StatusOr<VerificationSummary> VerifyDp(std::size_t vocab_size,
                                             std::size_t z, double lambda,
                                             std::int64_t trials, Rng& rng) {
  if (vocab_size < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("vocabulary size must be at least 2, got ", vocab_size));
  }
  if (trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("trials must be at least 1, got ", trials));
  }
  if (absl::Status s = CheckLambda(lambda); !s.ok()) return s;
  if (absl::Status s = CheckInstanceSize(vocab_size, z); !s.ok()) return s;

  VerificationSummary summary;
  summary.min_random_slack = std::numeric_limits<double>::infinity();
  auto check = [&](std::vector<Distribution> a, std::vector<Distribution> b,
                   bool adversarial) -> absl::Status {
    absl::StatusOr<NeighborPair> pair =
        NeighborPair::Create(std::move(a), std::move(b), lambda);
    if (!pair.ok()) return pair.status();
    absl::StatusOr<RatioReport> report = MaxLikelihoodRatio(*pair);
    if (!report.ok()) return report.status();
    ++summary.pairs_checked;
    summary.theoretical_bound = report->theoretical_bound;
    summary.max_log_ratio = std::max(summary.max_log_ratio, report->max_log_ratio);
    if (report->max_log_ratio > report->theoretical_bound + kVerifierTolerance) {
      summary.bounded = false;
    }
    if (adversarial) {
      if (!report->tight) summary.adversarial_tight = false;
    } else {
      summary.min_random_slack =
          std::min(summary.min_random_slack,
                   report->theoretical_bound - report->max_log_ratio);
    }
    return absl::OkStatus();
  };

  // Point masses on distinct corners at every position, plus one pair whose
  // corners change from position to position.
  for (std::size_t j = 0; j < vocab_size; ++j) {
    for (std::size_t k = 0; k < vocab_size; ++k) {
      if (j == k) continue;
      std::vector<Distribution> a(
          z, Distribution::PointMass(vocab_size, static_cast<TokenId>(j)));
      std::vector<Distribution> b(
          z, Distribution::PointMass(vocab_size, static_cast<TokenId>(k)));
      if (absl::Status s = check(std::move(a), std::move(b), true); !s.ok()) {
        return s;
      }
    }
  }
  {
    std::vector<Distribution> a, b;
    for (std::size_t i = 0; i < z; ++i) {
      a.push_back(Distribution::PointMass(
          vocab_size, static_cast<TokenId>(i % vocab_size)));
      b.push_back(Distribution::PointMass(
          vocab_size, static_cast<TokenId>((i + 1) % vocab_size)));
    }
    if (absl::Status s = check(std::move(a), std::move(b), true); !s.ok()) {
      return s;
    }
  }

  for (std::int64_t t = 0; t < trials; ++t) {
    std::vector<Distribution> a, b;
    for (std::size_t i = 0; i < z; ++i) a.push_back(SampleSimplex(vocab_size, rng));
    for (std::size_t i = 0; i < z; ++i) b.push_back(SampleSimplex(vocab_size, rng));
    if (absl::Status s = check(std::move(a), std::move(b), false); !s.ok()) {
      return s;
    }
  }
  return summary;
}

}  // namespace dpdecode
