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

// Probability-simplex value types and the interpolate-toward-uniform
// perturbation applied to a model's output distribution at decode time.
//
// All types are immutable after construction. Factories validate their
// inputs and return absl::StatusOr; a successfully constructed value always
// satisfies its invariants.

#ifndef DPDECODE_SIMPLEX_H_
#define DPDECODE_SIMPLEX_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"

namespace dpdecode {

using TokenId = std::int32_t;

// Sum deviations up to this are renormalized away; larger ones are rejected.
inline constexpr double kRenormalizeTolerance = 1e-6;
// Every constructed distribution sums to 1 within this.
inline constexpr double kSumTolerance = 1e-9;

// Ordered set of distinct token strings with stable indices.
class Vocabulary {
 public:
  // Requires at least two distinct tokens.
  static absl::StatusOr<Vocabulary> Create(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<TokenId> Find(std::string_view token) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  explicit Vocabulary(std::vector<std::string> tokens);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// A point on the probability simplex over |V| >= 2 outcomes.
class Distribution {
 public:
  // Entries must be finite and non-negative. A total within
  // kRenormalizeTolerance of 1 is rescaled to sum to 1; anything further off
  // is an error.
  static absl::StatusOr<Distribution> Create(std::vector<double> mass);

  static Distribution Uniform(std::size_t size);
  static Distribution PointMass(std::size_t size, TokenId at);

  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t k) const { return mass_[k]; }
  std::span<const double> mass() const { return mass_; }

 private:
  explicit Distribution(std::vector<double> mass) : mass_(std::move(mass)) {}

  std::vector<double> mass_;
};

// The interpolation weight toward the model's own distribution. 0 is the
// uniform distribution, 1 leaves the model untouched.
class PerturbationParams {
 public:
  static absl::StatusOr<PerturbationParams> Create(double lambda);

  double lambda() const { return lambda_; }

 private:
  explicit PerturbationParams(double lambda) : lambda_(lambda) {}

  double lambda_;
};

struct ProbabilityBounds {
  double floor;
  double ceiling;
};

// Result of Perturb(). Every entry lies in Bounds(lambda, size()).
class PerturbedDistribution {
 public:
  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t k) const { return mass_[k]; }
  std::span<const double> mass() const { return mass_; }
  double lambda() const { return lambda_; }

  // Views the perturbed masses as a plain distribution, e.g. to perturb again.
  Distribution AsDistribution() const;

 private:
  friend PerturbedDistribution Perturb(const Distribution& q,
                                       const PerturbationParams& params);

  PerturbedDistribution(std::vector<double> mass, double lambda)
      : mass_(std::move(mass)), lambda_(lambda) {}

  std::vector<double> mass_;
  double lambda_;
};

Distribution Uniform(const Vocabulary& vocab);

// q' = lambda * q + (1 - lambda) * u, entrywise.
PerturbedDistribution Perturb(const Distribution& q,
                              const PerturbationParams& params);

// As above, but checks that q has one entry per vocabulary token.
absl::StatusOr<PerturbedDistribution> Perturb(const Distribution& q,
                                              const PerturbationParams& params,
                                              const Vocabulary& vocab);

// Single entry of Perturb(q, params) without materializing the vector.
double PerturbedMass(double q_k, double lambda, std::size_t vocab_size);

// Tightest per-entry range of any perturbed distribution:
// ((1 - lambda) / |V|, lambda + (1 - lambda) / |V|).
ProbabilityBounds Bounds(const PerturbationParams& params,
                         const Vocabulary& vocab);
ProbabilityBounds Bounds(double lambda, std::size_t vocab_size);

}  // namespace dpdecode

#endif  // DPDECODE_SIMPLEX_H_
