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

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpdecode/format.h"
#include "dpdecode/rng.h"
#include "text_util.h"

namespace dpdecode {
namespace {

absl::Status ValidateLambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must lie in [0, 1], got ", lambda));
  }
  return absl::OkStatus();
}

double NegLogLikelihood(double q_true, double lambda, std::size_t vocab_size) {
  return -std::log(PerturbedMass(q_true, lambda, vocab_size));
}

}  // namespace

absl::StatusOr<double> Perplexity(
    std::span<const PerturbedDistribution> perturbed,
    std::span<const TokenId> true_tokens) {
  if (perturbed.size() != true_tokens.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(perturbed.size(), " distributions for ",
                     true_tokens.size(), " tokens"));
  }
  if (perturbed.empty()) {
    return absl::InvalidArgumentError("perplexity of an empty token set");
  }
  double nll = 0.0;
  for (std::size_t i = 0; i < perturbed.size(); ++i) {
    const TokenId t = true_tokens[i];
    if (t < 0 || static_cast<std::size_t>(t) >= perturbed[i].size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("token id ", t, " outside the distribution"));
    }
    nll -= std::log(perturbed[i][t]);
  }
  return std::exp(nll / static_cast<double>(perturbed.size()));
}

absl::StatusOr<MaskedScores> ScoreMaskedCorpus(const Corpus& corpus,
                                               const NGramMLM& model,
                                               double mask_rate,
                                               std::uint64_t seed) {
  if (!(corpus.vocab == model.vocab())) {
    return absl::InvalidArgumentError(
        "corpus and model use different vocabularies");
  }
  Rng rng(seed);
  absl::StatusOr<std::vector<MaskedExample>> masked =
      MaskCorpus(corpus, mask_rate, rng);
  if (!masked.ok()) return masked.status();

  MaskedScores scores;
  scores.true_token_probs.reserve(masked->size());
  scores.mask_counts.reserve(masked->size());
  for (const MaskedExample& example : *masked) {
    std::vector<Distribution> predicted = model.PredictMasked(example);
    std::vector<double> probs;
    probs.reserve(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      probs.push_back(predicted[i][example.originals()[i]]);
    }
    scores.mask_counts.push_back(static_cast<std::int64_t>(probs.size()));
    scores.true_token_probs.push_back(std::move(probs));
  }
  return scores;
}

absl::StatusOr<double> PerturbedPerplexity(const MaskedScores& scores,
                                           double lambda,
                                           std::size_t vocab_size,
                                           PerplexityPooling pooling) {
  if (absl::Status s = ValidateLambda(lambda); !s.ok()) return s;
  double total = 0.0;
  std::size_t units = 0;
  for (const std::vector<double>& probs : scores.true_token_probs) {
    if (probs.empty()) continue;
    double example_nll = 0.0;
    for (double q : probs) example_nll += NegLogLikelihood(q, lambda, vocab_size);
    if (pooling == PerplexityPooling::kTokenPooled) {
      total += example_nll;
      units += probs.size();
    } else {
      total += example_nll / static_cast<double>(probs.size());
      ++units;
    }
  }
  if (units == 0) {
    return absl::InvalidArgumentError("no tokens were masked");
  }
  return std::exp(total / static_cast<double>(units));
}

absl::StatusOr<std::vector<SweepRecord>> Sweep(const Corpus& corpus,
                                               const NGramMLM& model,
                                               const SweepOptions& options) {
  if (options.restarts < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("restarts must be at least 1, got ", options.restarts));
  }
  if (options.lambdas.empty()) {
    return absl::InvalidArgumentError("empty lambda grid");
  }
  for (double lambda : options.lambdas) {
    if (absl::Status s = ValidateLambda(lambda); !s.ok()) return s;
  }
  const std::size_t vocab_size = model.vocab().size();

  std::vector<absl::StatusOr<MaskedScores>> restarts(options.restarts);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int threads = std::min<int>(
      options.restarts, options.max_threads > 0 ? options.max_threads
                                                : static_cast<int>(hw));
  for (int begin = 0; begin < options.restarts; begin += threads) {
    std::vector<std::future<absl::StatusOr<MaskedScores>>> batch;
    const int end = std::min(options.restarts, begin + threads);
    for (int r = begin; r < end; ++r) {
      batch.push_back(std::async(std::launch::async, [&, r] {
        return ScoreMaskedCorpus(corpus, model, options.mask_rate,
                                 options.base_seed + static_cast<std::uint64_t>(r));
      }));
    }
    for (int r = begin; r < end; ++r) restarts[r] = batch[r - begin].get();
  }
  for (const auto& scores : restarts) {
    if (!scores.ok()) return scores.status();
  }

  // Every restart masks the same examples, so pooling the counts averages
  // the per-restart means.
  std::vector<std::int64_t> pooled_counts;
  for (const auto& scores : restarts) {
    pooled_counts.insert(pooled_counts.end(), scores->mask_counts.begin(),
                         scores->mask_counts.end());
  }

  std::vector<double> lambdas = options.lambdas;
  std::stable_sort(lambdas.begin(), lambdas.end());
  std::vector<SweepRecord> records;
  records.reserve(lambdas.size());
  for (double lambda : lambdas) {
    absl::StatusOr<EpsilonReport> epsilon =
        CorpusAverageEpsilon(pooled_counts, lambda, vocab_size);
    if (!epsilon.ok()) return epsilon.status();

    std::vector<double> ppl;
    ppl.reserve(restarts.size());
    for (const auto& scores : restarts) {
      absl::StatusOr<double> p =
          PerturbedPerplexity(*scores, lambda, vocab_size, options.pooling);
      if (!p.ok()) return p.status();
      ppl.push_back(*p);
    }
    double mean = 0.0;
    for (double p : ppl) mean += p;
    mean /= static_cast<double>(ppl.size());
    double sq = 0.0;
    for (double p : ppl) sq += (p - mean) * (p - mean);
    const double stddev =
        ppl.size() > 1 ? std::sqrt(sq / static_cast<double>(ppl.size() - 1))
                       : 0.0;

    records.push_back({.lambda = lambda,
                       .avg_masked_tokens = epsilon->avg_masked_tokens,
                       .avg_epsilon = epsilon->avg_epsilon,
                       .perplexity_mean = mean,
                       .perplexity_std = stddev,
                       .restarts = options.restarts});
  }
  return records;
}

std::string SweepToCsv(std::span<const SweepRecord> records) {
  std::string out = absl::StrCat(std::string(kSweepCsvHeader), "\n");
  for (const SweepRecord& r : records) {
    absl::StrAppend(&out, FormatSignificant(r.lambda, 6), ",",
                    FormatSignificant(r.avg_masked_tokens, 6), ",",
                    FormatSignificant(r.avg_epsilon.nats(), 6), ",",
                    FormatSignificant(r.perplexity_mean, 6), ",",
                    FormatSignificant(r.perplexity_std, 6), ",", r.restarts,
                    "\n");
  }
  return out;
}

std::vector<double> DefaultLambdaGrid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

absl::StatusOr<std::vector<double>> ParseLambdaGrid(std::string_view text) {
  text = internal::StripWhitespace(text);
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts = internal::Split(text, ":", false);
    double start = 0, stop = 0, step = 0;
    if (parts.size() != 3 || !internal::ParseNumber(parts[0], &start) ||
        !internal::ParseNumber(parts[1], &stop) ||
        !internal::ParseNumber(parts[2], &step)) {
      return absl::InvalidArgumentError(
          absl::StrCat("lambda range must be start:stop:step, got '",
                       std::string(text),
                       "'"));
    }
    if (!(step > 0.0) || stop < start) {
      return absl::InvalidArgumentError(
          absl::StrCat("empty or non-advancing lambda range '",
                       std::string(text), "'"));
    }
    const auto steps =
        static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9));
    for (std::int64_t i = 0; i <= steps; ++i) {
      // Snap to 12 decimals so 0:1:0.1 yields 0.3, not 0.30000000000000004.
      const double v = start + static_cast<double>(i) * step;
      grid.push_back(std::round(v * 1e12) / 1e12);
    }
  } else {
    for (std::string_view item : internal::Split(text, ",", false)) {
      double v = 0;
      if (!internal::ParseNumber(internal::StripWhitespace(item), &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("bad lambda value '", std::string(item), "'"));
      }
      grid.push_back(v);
    }
  }
  for (double v : grid) {
    if (absl::Status s = ValidateLambda(v); !s.ok()) return s;
  }
  return grid;
}

}  // namespace dpdecode
