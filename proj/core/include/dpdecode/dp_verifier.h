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

// Brute-force check of the privacy bound on tiny instances. For two inputs
// with the same number z of masked positions, every one of the |V|^z possible
// outputs is enumerated and its likelihood ratio compared against
// z * ln((1 + (|V| - 1) * lambda) / (1 - lambda)).
//
// This is a test oracle, not a production path; instance size is capped.

#ifndef DPDECODE_DP_VERIFIER_H_
#define DPDECODE_DP_VERIFIER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpdecode/rng.h"
#include "dpdecode/simplex.h"

namespace dpdecode {

inline constexpr std::size_t kMaxVerifierVocab = 8;
inline constexpr std::size_t kMaxVerifierPositions = 4;
// Slack allowed between an enumerated ratio and the closed-form bound.
inline constexpr double kVerifierTolerance = 1e-9;

// Model outputs for two inputs c and c', one distribution per masked
// position.
class NeighborPair {
 public:
  static absl::StatusOr<NeighborPair> Create(std::vector<Distribution> a,
                                             std::vector<Distribution> b,
                                             double lambda);

  std::span<const Distribution> distributions_a() const { return a_; }
  std::span<const Distribution> distributions_b() const { return b_; }
  double lambda() const { return lambda_; }
  std::size_t positions() const { return a_.size(); }
  std::size_t vocab_size() const;

 private:
  NeighborPair(std::vector<Distribution> a, std::vector<Distribution> b,
               double lambda)
      : a_(std::move(a)), b_(std::move(b)), lambda_(lambda) {}

  std::vector<Distribution> a_;
  std::vector<Distribution> b_;
  double lambda_;
};

// prod_i (lambda * q_i(y_i) + (1 - lambda) / |V|); 1 for z = 0.
absl::StatusOr<double> OutputProbability(
    std::span<const Distribution> distributions, double lambda,
    std::span<const TokenId> y);

struct RatioReport {
  double max_log_ratio;
  double theoretical_bound;
  std::vector<TokenId> argmax_sequence;
  bool tight;
};

// Enumerates all outputs y and reports max_y ln(Pr_a[y] / Pr_b[y]).
// Requires lambda < 1, |V| <= 8 and z <= 4.
absl::StatusOr<RatioReport> MaxLikelihoodRatio(const NeighborPair& pair);

struct VerificationSummary {
  // Every pair stayed within bound + kVerifierTolerance.
  bool bounded = true;
  // Every adversarial point-mass pair met the bound within the tolerance.
  bool adversarial_tight = true;
  std::int64_t pairs_checked = 0;
  double theoretical_bound = 0.0;
  double max_log_ratio = 0.0;
  // Smallest bound - max_log_ratio over the random pairs.
  double min_random_slack = 0.0;

  bool ok() const { return bounded && adversarial_tight; }
};

// Checks `trials` random pairs (each distribution uniform on the simplex)
// plus a fixed family of point-mass pairs, which sit on the corners of the
// simplex where the bound is attained.
absl::StatusOr<VerificationSummary> VerifyDp(std::size_t vocab_size,
                                             std::size_t z, double lambda,
                                             std::int64_t trials, Rng& rng);

// Uniform draw from the simplex via normalized exponentials.
Distribution SampleSimplex(std::size_t size, Rng& rng);

}  // namespace dpdecode

#endif  // DPDECODE_DP_VERIFIER_H_
