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

#include <cmath>
#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "dpdecode/dp_verifier.h"
#include "gtest/gtest.h"
#include "testing/oracles.h"

namespace dpdecode {
namespace {

using ::dpdecode::testing::ChiSquareGoodnessOfFit;

constexpr double kSignificance = 1e-3;

PerturbedDistribution PerturbWith(std::vector<double> q, double lambda) {
  return Perturb(*Distribution::Create(std::move(q)),
                 *PerturbationParams::Create(lambda));
}

std::vector<std::int64_t> Histogram(const PerturbedDistribution& q, int draws,
                                    Rng& rng) {
  std::vector<std::int64_t> counts(q.size(), 0);
  for (int i = 0; i < draws; ++i) ++counts[SampleToken(q, rng)];
  return counts;
}

Vocabulary TestVocab(std::size_t size) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < size; ++i) tokens.push_back("t" + std::to_string(i));
  return *Vocabulary::Create(std::move(tokens));
}

DecodeSession MakeSession(std::size_t vocab_size, double lambda,
                          std::int64_t cap, std::uint64_t seed,
                          bool retain = false) {
  return *DecodeSession::Create(
      TestVocab(vocab_size), *PerturbationParams::Create(lambda),
      *PrivacyAccount::Create(vocab_size, lambda, cap), seed,
      {.retain_distributions = retain});
}

MaskedExample Example(std::size_t length, std::vector<std::size_t> masked) {
  return *MaskedExample::FromFullSequence(std::vector<TokenId>(length, 1),
                                          std::move(masked));
}

TEST(SampleTokenTest, PointMassIsDeterministic) {
  PerturbedDistribution q = PerturbWith({1.0, 0.0, 0.0}, 1.0);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(SampleToken(q, rng), 0);
}

TEST(SampleTokenTest, UniformPassesChiSquare) {
  PerturbedDistribution q = PerturbWith({0.25, 0.25, 0.25, 0.25}, 1.0);
  Rng rng(2024);
  std::vector<std::int64_t> counts = Histogram(q, 100000, rng);
  auto result = ChiSquareGoodnessOfFit(counts, q.mass());
  EXPECT_EQ(result.degrees_of_freedom, 3);
  EXPECT_GT(result.p_value, kSignificance) << "chi2 = " << result.statistic;
}

TEST(SampleTokenTest, PerturbedDistributionsPassChiSquare) {
  Rng draws(77);
  Rng shapes(78);
  for (double lambda : {0.0, 0.3, 0.5, 0.9, 1.0}) {
    for (int i = 0; i < 5; ++i) {
      Distribution q = SampleSimplex(12, shapes);
      PerturbedDistribution p = Perturb(q, *PerturbationParams::Create(lambda));
      std::vector<std::int64_t> counts = Histogram(p, 100000, draws);
      auto result = ChiSquareGoodnessOfFit(counts, p.mass());
      EXPECT_GT(result.p_value, kSignificance)
          << "lambda " << lambda << " chi2 " << result.statistic;
    }
  }
}

TEST(SampleTokenTest, ChiSquareDetectsWrongDistribution) {
  // Guard against a vacuous oracle: sampling q but testing against uniform.
  PerturbedDistribution q = PerturbWith({0.4, 0.3, 0.2, 0.1}, 1.0);
  Rng rng(5);
  std::vector<std::int64_t> counts = Histogram(q, 100000, rng);
  const std::vector<double> uniform(4, 0.25);
  EXPECT_LT(ChiSquareGoodnessOfFit(counts, uniform).p_value, 1e-12);
}

TEST(SampleTokenTest, FixedSeedReproducesSequence) {
  PerturbedDistribution q = PerturbWith({0.7, 0.2, 0.1}, 0.5);
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(SampleToken(q, a), SampleToken(q, b));
}

TEST(SampleTokenTest, EveryTokenReachableBelowLambdaOne) {
  PerturbedDistribution q = PerturbWith({1.0, 0.0, 0.0, 0.0, 0.0}, 0.9);
  Rng rng(9);
  std::vector<std::int64_t> counts = Histogram(q, 20000, rng);
  for (std::int64_t c : counts) EXPECT_GT(c, 0);
}

TEST(DecodeSessionTest, RejectsMismatchedAccount) {
  EXPECT_FALSE(DecodeSession::Create(TestVocab(3), *PerturbationParams::Create(0.5),
                                     *PrivacyAccount::Create(4, 0.5, 3), 1)
                   .ok());
  EXPECT_FALSE(DecodeSession::Create(TestVocab(3), *PerturbationParams::Create(0.5),
                                     *PrivacyAccount::Create(3, 0.4, 3), 1)
                   .ok());
}

TEST(DecodeSessionTest, NoMasksSpendsNothing) {
  DecodeSession session = MakeSession(3, 0.5, 1, 7);
  absl::StatusOr<DecodeResult> r = session.Decode(Example(4, {}), {});
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->filled_tokens.empty());
  EXPECT_EQ(r->epsilon_spent.nats(), 0.0);
  EXPECT_EQ(session.account().predictions_made(), 0);
}

TEST(DecodeSessionTest, TwoMasksSpendSequenceEpsilon) {
  DecodeSession session = MakeSession(3, 0.5, 5, 7);
  std::vector<Distribution> q = {Distribution::PointMass(3, 0),
                                 Distribution::Uniform(3)};
  absl::StatusOr<DecodeResult> r = session.Decode(Example(4, {1, 3}), q);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->filled_tokens.size(), 2u);
  EXPECT_TRUE(r->filled_tokens.contains(1));
  EXPECT_TRUE(r->filled_tokens.contains(3));
  EXPECT_NEAR(r->epsilon_spent.nats(), 2 * std::log(4.0), 1e-15);
  EXPECT_EQ(r->epsilon_spent.nats(), SequenceEpsilon(0.5, 3, 2)->nats());
  EXPECT_EQ(session.account().predictions_made(), 2);
  EXPECT_FALSE(r->per_position_distributions.has_value());
}

TEST(DecodeSessionTest, LambdaZeroIsUniformAcrossSeeds) {
  const std::size_t v = 5;
  std::vector<std::int64_t> counts(v, 0);
  for (std::uint64_t seed = 0; seed < 20000; ++seed) {
    DecodeSession session = MakeSession(v, 0.0, 1, seed);
    std::vector<Distribution> q = {Distribution::PointMass(v, 3)};
    DecodeResult r = *session.Decode(Example(3, {1}), q);
    ++counts[r.filled_tokens.at(1)];
  }
  const std::vector<double> uniform(v, 1.0 / v);
  EXPECT_GT(ChiSquareGoodnessOfFit(counts, uniform).p_value, kSignificance);
}

TEST(DecodeSessionTest, BudgetExhaustionIsAllOrNothing) {
  DecodeSession session = MakeSession(4, 0.3, 3, 11);
  std::vector<Distribution> two(2, Distribution::Uniform(4));
  ASSERT_TRUE(session.Decode(Example(5, {0, 2}), two).ok());
  absl::StatusOr<DecodeResult> refused = session.Decode(Example(5, {1, 4}), two);
  EXPECT_EQ(refused.status().code(), absl::StatusCode::kResourceExhausted);
  EXPECT_EQ(session.account().predictions_made(), 2);
  std::vector<Distribution> one(1, Distribution::Uniform(4));
  ASSERT_TRUE(session.Decode(Example(5, {3}), one).ok());
  EXPECT_EQ(session.account().predictions_made(), 3);
  EXPECT_FALSE(session.Decode(Example(5, {3}), one).ok());
}

TEST(DecodeSessionTest, RefusalDoesNotAdvanceRandomStream) {
  DecodeSession a = MakeSession(6, 0.5, 2, 3);
  DecodeSession b = MakeSession(6, 0.5, 2, 3);
  std::vector<Distribution> three(3, Distribution::Uniform(6));
  ASSERT_FALSE(a.Decode(Example(4, {0, 1, 2}), three).ok());
  std::vector<Distribution> two(2, Distribution::Uniform(6));
  EXPECT_EQ(a.Decode(Example(4, {0, 1}), two)->filled_tokens,
            b.Decode(Example(4, {0, 1}), two)->filled_tokens);
}

TEST(DecodeSessionTest, WrongDistributionCountOrSize) {
  DecodeSession session = MakeSession(3, 0.5, 5, 1);
  std::vector<Distribution> one(1, Distribution::Uniform(3));
  EXPECT_EQ(session.Decode(Example(4, {0, 1}), one).status().code(),
            absl::StatusCode::kInvalidArgument);
  std::vector<Distribution> wrong(1, Distribution::Uniform(4));
  EXPECT_EQ(session.Decode(Example(4, {0}), wrong).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(session.account().predictions_made(), 0);
}

TEST(DecodeSessionTest, AuditRetainsPerturbedDistributions) {
  DecodeSession session = MakeSession(3, 0.5, 5, 1, /*retain=*/true);
  std::vector<Distribution> q = {Distribution::PointMass(3, 0)};
  DecodeResult r = *session.Decode(Example(2, {1}), q);
  ASSERT_TRUE(r.per_position_distributions.has_value());
  ASSERT_EQ(r.per_position_distributions->size(), 1u);
  EXPECT_NEAR((*r.per_position_distributions)[0][0], 0.5 + 1.0 / 6, 1e-15);
}

TEST(DecodeSessionTest, IdenticalInputsGiveIdenticalResults) {
  Rng shapes(4);
  std::vector<Distribution> q;
  for (int i = 0; i < 6; ++i) q.push_back(SampleSimplex(8, shapes));
  DecodeSession a = MakeSession(8, 0.7, 100, 99);
  DecodeSession b = MakeSession(8, 0.7, 100, 99);
  for (int round = 0; round < 10; ++round) {
    DecodeResult ra = *a.Decode(Example(10, {0, 2, 3, 5, 7, 9}), q);
    DecodeResult rb = *b.Decode(Example(10, {0, 2, 3, 5, 7, 9}), q);
    ASSERT_EQ(ra.filled_tokens, rb.filled_tokens);
    ASSERT_EQ(ra.epsilon_spent, rb.epsilon_spent);
  }
}

}  // namespace
}  // namespace dpdecode
