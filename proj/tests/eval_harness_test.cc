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

#include "dpdecode/eval_harness.h"

#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "testing/synthetic_corpus.h"

namespace dpdecode {
namespace {

using ::dpdecode::testing::SyntheticCorpusText;

PerturbedDistribution PerturbWith(const Distribution& q, double lambda) {
  return Perturb(q, *PerturbationParams::Create(lambda));
}

struct Fixture {
  Corpus corpus;
  NGramMLM model;
};

Fixture MakeFixture(int lines, std::uint64_t seed) {
  Corpus corpus = *BuildVocabAndTokenize(SyntheticCorpusText(lines, seed));
  NGramMLM model = *NGramMLM::Train(corpus, 1, 0.1);
  return {std::move(corpus), std::move(model)};
}

TEST(PerplexityTest, UniformGivesVocabularySize) {
  for (std::size_t v : {2u, 7u, 1000u}) {
    std::vector<PerturbedDistribution> d(
        5, PerturbWith(Distribution::Uniform(v), 1.0));
    std::vector<TokenId> truth = {0, 1, 1, 0, 1};
    EXPECT_NEAR(*Perplexity(d, truth), static_cast<double>(v), 1e-12 * v);
  }
}

TEST(PerplexityTest, PerfectPredictionsGiveOne) {
  std::vector<PerturbedDistribution> d = {
      PerturbWith(Distribution::PointMass(3, 2), 1.0),
      PerturbWith(Distribution::PointMass(3, 0), 1.0)};
  std::vector<TokenId> truth = {2, 0};
  EXPECT_EQ(*Perplexity(d, truth), 1.0);
}

TEST(PerplexityTest, GeometricMeanByHand) {
  // exp(-(ln 0.5 + ln 0.125) / 2) = sqrt(2 * 8) = 4.
  std::vector<PerturbedDistribution> d = {
      PerturbWith(*Distribution::Create({0.5, 0.5}), 1.0),
      PerturbWith(*Distribution::Create({0.125, 0.875}), 1.0)};
  std::vector<TokenId> truth = {0, 0};
  EXPECT_NEAR(*Perplexity(d, truth), 4.0, 1e-14);
}

TEST(PerplexityTest, Errors) {
  EXPECT_FALSE(Perplexity({}, {}).ok());
  std::vector<PerturbedDistribution> d = {
      PerturbWith(Distribution::Uniform(2), 0.5)};
  std::vector<TokenId> two = {0, 1};
  EXPECT_FALSE(Perplexity(d, two).ok());
  std::vector<TokenId> bad = {5};
  EXPECT_FALSE(Perplexity(d, bad).ok());
}

TEST(PerturbedPerplexityTest, MatchesFullDistributionRoute) {
  Fixture f = MakeFixture(300, 1);
  Rng rng(5);
  std::vector<MaskedExample> masked = *MaskCorpus(f.corpus, 0.15, rng);
  MaskedScores scores = *ScoreMaskedCorpus(f.corpus, f.model, 0.15, 5);
  for (double lambda : {0.0, 0.25, 0.6, 1.0}) {
    std::vector<PerturbedDistribution> perturbed;
    std::vector<TokenId> truth;
    for (const MaskedExample& ex : masked) {
      std::vector<Distribution> q = f.model.PredictMasked(ex);
      for (std::size_t i = 0; i < q.size(); ++i) {
        perturbed.push_back(PerturbWith(q[i], lambda));
        truth.push_back(ex.originals()[i]);
      }
    }
    const double direct = *Perplexity(perturbed, truth);
    const double fast = *PerturbedPerplexity(scores, lambda, f.corpus.vocab.size(),
                                             PerplexityPooling::kTokenPooled);
    EXPECT_NEAR(fast, direct, 1e-10 * direct) << "lambda " << lambda;
  }
}

TEST(PerturbedPerplexityTest, ExampleAveragedPoolingAlsoPinsLambdaZero) {
  Fixture f = MakeFixture(200, 2);
  MaskedScores scores = *ScoreMaskedCorpus(f.corpus, f.model, 0.15, 1);
  const double v = static_cast<double>(f.corpus.vocab.size());
  EXPECT_NEAR(*PerturbedPerplexity(scores, 0.0, f.corpus.vocab.size(),
                                   PerplexityPooling::kExampleAveraged),
              v, 1e-9 * v);
  // The two poolings differ once the model is informative.
  EXPECT_NE(*PerturbedPerplexity(scores, 1.0, f.corpus.vocab.size(),
                                 PerplexityPooling::kExampleAveraged),
            *PerturbedPerplexity(scores, 1.0, f.corpus.vocab.size(),
                                 PerplexityPooling::kTokenPooled));
}

TEST(PerturbedPerplexityTest, NoMaskedTokensIsAnError) {
  MaskedScores empty{.true_token_probs = {{}, {}}, .mask_counts = {0, 0}};
  EXPECT_FALSE(PerturbedPerplexity(empty, 0.5, 10,
                                   PerplexityPooling::kTokenPooled)
                   .ok());
}

TEST(PerTokenLossTest, StrictlyDecreasingWhenModelBeatsUniform) {
  const std::size_t v = 50;
  for (double q_true : {0.021, 0.1, 0.5, 0.99}) {
    double previous = INFINITY;
    for (int i = 0; i <= 100; ++i) {
      const double loss = -std::log(PerturbedMass(q_true, i / 100.0, v));
      ASSERT_LT(loss, previous);
      previous = loss;
    }
  }
}

TEST(ScoreMaskedCorpusTest, SameSeedSameScores) {
  Fixture f = MakeFixture(100, 3);
  MaskedScores a = *ScoreMaskedCorpus(f.corpus, f.model, 0.15, 42);
  MaskedScores b = *ScoreMaskedCorpus(f.corpus, f.model, 0.15, 42);
  EXPECT_EQ(a.true_token_probs, b.true_token_probs);
  EXPECT_EQ(a.mask_counts, b.mask_counts);
}

TEST(ScoreMaskedCorpusTest, RejectsForeignVocabulary) {
  Fixture f = MakeFixture(100, 3);
  Corpus other = *BuildVocabAndTokenize("x y z");
  EXPECT_FALSE(ScoreMaskedCorpus(other, f.model, 0.15, 1).ok());
}

TEST(SweepTest, LambdaZeroPinsVocabularySize) {
  Fixture f = MakeFixture(500, 4);
  auto records = Sweep(f.corpus, f.model, {.lambdas = {0.0}, .restarts = 3});
  ASSERT_TRUE(records.ok()) << records.status();
  ASSERT_EQ(records->size(), 1u);
  const double v = static_cast<double>(f.corpus.vocab.size());
  EXPECT_EQ((*records)[0].avg_epsilon.nats(), 0.0);
  EXPECT_NEAR((*records)[0].perplexity_mean, v, 1e-6 * v);
  EXPECT_NEAR((*records)[0].perplexity_std, 0.0, 1e-9);
}

TEST(SweepTest, LambdaOneEqualsRawModel) {
  Fixture f = MakeFixture(500, 5);
  SweepOptions options{.lambdas = {1.0}, .restarts = 2, .base_seed = 10};
  SweepRecord r = (*Sweep(f.corpus, f.model, options))[0];
  EXPECT_TRUE(r.avg_epsilon.is_unbounded());

  double mean = 0;
  for (std::uint64_t seed : {10u, 11u}) {
    Rng rng(seed);
    double nll = 0;
    std::size_t n = 0;
    const std::vector<MaskedExample> masked = *MaskCorpus(f.corpus, 0.15, rng);
    for (const MaskedExample& ex : masked) {
      std::vector<Distribution> q = f.model.PredictMasked(ex);
      for (std::size_t i = 0; i < q.size(); ++i) {
        nll -= std::log(q[i][ex.originals()[i]]);
        ++n;
      }
    }
    mean += std::exp(nll / static_cast<double>(n)) / 2;
  }
  EXPECT_NEAR(r.perplexity_mean, mean, 1e-9 * mean);
}

TEST(SweepTest, SingleRestartHasZeroStd) {
  Fixture f = MakeFixture(200, 6);
  auto records = *Sweep(f.corpus, f.model, {.lambdas = {0.3, 0.8}, .restarts = 1});
  for (const SweepRecord& r : records) {
    EXPECT_EQ(r.perplexity_std, 0.0);
    EXPECT_EQ(r.restarts, 1);
  }
}

TEST(SweepTest, RecordsSortedAndMonotone) {
  Fixture f = MakeFixture(800, 7);
  SweepOptions options{.lambdas = {1.0, 0.5, 0.0, 0.2, 0.9}, .restarts = 3,
                       .base_seed = 1};
  auto records = *Sweep(f.corpus, f.model, options);
  ASSERT_EQ(records.size(), 5u);
  for (std::size_t i = 1; i < records.size(); ++i) {
    EXPECT_LT(records[i - 1].lambda, records[i].lambda);
    EXPECT_GT(records[i - 1].perplexity_mean, records[i].perplexity_mean);
    EXPECT_EQ(records[i].avg_masked_tokens, records[0].avg_masked_tokens);
  }
}

TEST(SweepTest, ThreadCountDoesNotChangeResults) {
  Fixture f = MakeFixture(300, 8);
  SweepOptions serial{.lambdas = DefaultLambdaGrid(), .restarts = 4,
                      .base_seed = 3, .max_threads = 1};
  SweepOptions parallel = serial;
  parallel.max_threads = 4;
  EXPECT_EQ(SweepToCsv(*Sweep(f.corpus, f.model, serial)),
            SweepToCsv(*Sweep(f.corpus, f.model, parallel)));
}

TEST(SweepTest, InvalidOptions) {
  Fixture f = MakeFixture(50, 9);
  EXPECT_FALSE(Sweep(f.corpus, f.model, {.lambdas = {0.5}, .restarts = 0}).ok());
  EXPECT_FALSE(Sweep(f.corpus, f.model, {.lambdas = {}}).ok());
  EXPECT_FALSE(Sweep(f.corpus, f.model, {.lambdas = {1.5}}).ok());
}

TEST(SweepCsvTest, ExactLayout) {
  std::vector<SweepRecord> records = {
      {.lambda = 0.0, .avg_masked_tokens = 1.5, .avg_epsilon = Epsilon::Nats(0),
       .perplexity_mean = 97.0, .perplexity_std = 0.0, .restarts = 3},
      {.lambda = 0.1, .avg_masked_tokens = 1.5,
       .avg_epsilon = Epsilon::Nats(1.23456789), .perplexity_mean = 12.3456789,
       .perplexity_std = 0.000123456789, .restarts = 3},
      {.lambda = 1.0, .avg_masked_tokens = 1.5,
       .avg_epsilon = Epsilon::Unbounded(), .perplexity_mean = 2.0,
       .perplexity_std = 0.5, .restarts = 3}};
  EXPECT_EQ(SweepToCsv(records),
            "lambda,avg_masked_tokens,avg_epsilon,perplexity_mean,"
            "perplexity_std,restarts\n"
            "0,1.5,0,97,0,3\n"
            "0.1,1.5,1.23457,12.3457,0.000123457,3\n"
            "1,1.5,inf,2,0.5,3\n");
}

TEST(LambdaGridTest, ListsAndRanges) {
  EXPECT_EQ(*ParseLambdaGrid("0.1,0.5,1"), (std::vector<double>{0.1, 0.5, 1}));
  std::vector<double> range = *ParseLambdaGrid("0:1:0.1");
  EXPECT_EQ(range, DefaultLambdaGrid());
  EXPECT_EQ(range[3], 0.3);
  EXPECT_EQ(*ParseLambdaGrid("0.2:0.2:0.1"), (std::vector<double>{0.2}));
  EXPECT_FALSE(ParseLambdaGrid("0:1").ok());
  EXPECT_FALSE(ParseLambdaGrid("0:1:0").ok());
  EXPECT_FALSE(ParseLambdaGrid("1:0:0.1").ok());
  EXPECT_FALSE(ParseLambdaGrid("0.5,abc").ok());
  EXPECT_FALSE(ParseLambdaGrid("0:2:0.5").ok());
  EXPECT_EQ(DefaultLambdaGrid().size(), 11u);
}

}  // namespace
}  // namespace dpdecode
