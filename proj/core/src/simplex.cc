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

#include "dpdecode/simplex.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpdecode {

absl::StatusOr<Vocabulary> Vocabulary::Create(std::vector<std::string> tokens) {
  if (tokens.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("vocabulary needs at least 2 tokens, got ", tokens.size()));
  }
  Vocabulary vocab(std::move(tokens));
  if (vocab.index_.size() != vocab.tokens_.size()) {
    return absl::InvalidArgumentError("vocabulary tokens must be distinct");
  }
  return vocab;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i], static_cast<TokenId>(i));
  }
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<Distribution> Distribution::Create(std::vector<double> mass) {
  if (mass.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("distribution needs at least 2 entries, got ", mass.size()));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    if (!std::isfinite(mass[k]) || mass[k] < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("entry ", k, " is not a probability: ", mass[k]));
    }
    total += mass[k];
  }
  if (std::abs(total - 1.0) > kRenormalizeTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("entries sum to ", total, ", not 1"));
  }
  if (total != 1.0) {
    for (double& m : mass) m /= total;
  }
  return Distribution(std::move(mass));
}

Distribution Distribution::Uniform(std::size_t size) {
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Distribution Distribution::PointMass(std::size_t size, TokenId at) {
  std::vector<double> mass(size, 0.0);
  mass.at(at) = 1.0;
  return Distribution(std::move(mass));
}

absl::StatusOr<PerturbationParams> PerturbationParams::Create(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must lie in [0, 1], got ", lambda));
  }
  return PerturbationParams(lambda);
}

Distribution PerturbedDistribution::AsDistribution() const {
  // Already validated: non-negative, sums to 1 within kSumTolerance.
  return *Distribution::Create(mass_);
}

Distribution Uniform(const Vocabulary& vocab) {
  return Distribution::Uniform(vocab.size());
}

double PerturbedMass(double q_k, double lambda, std::size_t vocab_size) {
  return lambda * q_k + (1.0 - lambda) / static_cast<double>(vocab_size);
}

PerturbedDistribution Perturb(const Distribution& q,
                              const PerturbationParams& params) {
  const double lambda = params.lambda();
  std::vector<double> mass(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    mass[k] = PerturbedMass(q[k], lambda, q.size());
  }
  return PerturbedDistribution(std::move(mass), lambda);
}

absl::StatusOr<PerturbedDistribution> Perturb(const Distribution& q,
                                              const PerturbationParams& params,
                                              const Vocabulary& vocab) {
  if (q.size() != vocab.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("distribution has ", q.size(),
                     " entries but the vocabulary has ", vocab.size()));
  }
  return Perturb(q, params);
}

ProbabilityBounds Bounds(double lambda, std::size_t vocab_size) {
  return {PerturbedMass(0.0, lambda, vocab_size),
          PerturbedMass(1.0, lambda, vocab_size)};
}

ProbabilityBounds Bounds(const PerturbationParams& params,
                         const Vocabulary& vocab) {
  return Bounds(params.lambda(), vocab.size());
}

}  // namespace dpdecode
