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

// A desk-scale masked language model: whitespace tokenization, random
// masking, and a count model over symmetric context windows. It exists so the
// decoding mechanism and the evaluation harness can run end to end without a
// neural model; any source of valid distributions would do.

#ifndef DPDECODE_TOY_MLM_H_
#define DPDECODE_TOY_MLM_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpdecode/masked_example.h"
#include "dpdecode/rng.h"
#include "dpdecode/simplex.h"

namespace dpdecode {

inline constexpr std::string_view kUnknownToken = "<unk>";
inline constexpr double kDefaultMaskRate = 0.15;
inline constexpr double kDefaultAlpha = 0.1;

// Lowercased whitespace-separated tokens of one line.
std::vector<std::string> TokenizeLine(std::string_view line);

struct Corpus {
  Vocabulary vocab;
  std::vector<std::vector<TokenId>> examples;

  std::size_t token_count() const;
};

// One example per non-blank line. The vocabulary is <unk> at id 0 followed by
// every distinct token ordered by descending frequency, ties by token text.
absl::StatusOr<Corpus> BuildVocabAndTokenize(std::string_view raw_text);

// Tokenizes text against an existing vocabulary, e.g. a trained model's.
// Out-of-vocabulary tokens become kUnknownTokenId.
absl::StatusOr<Corpus> TokenizeWithVocab(std::string_view raw_text,
                                         const Vocabulary& vocab);

// Maps tokens outside `vocab` to kUnknownTokenId.
std::vector<TokenId> Encode(const Vocabulary& vocab,
                            std::span<const std::string> tokens);

// Masks each token independently with probability `rate`, drawing one
// Uniform01() per token in corpus order.
absl::StatusOr<std::vector<MaskedExample>> MaskCorpus(const Corpus& corpus,
                                                      double rate, Rng& rng);

// Masks exactly the listed positions, one list per example.
absl::StatusOr<std::vector<MaskedExample>> MaskCorpusAt(
    const Corpus& corpus, std::span<const std::vector<std::size_t>> positions);

class NGramMLM {
 public:
  // Context of a position: `order` tokens to the left, then `order` to the
  // right. Positions past either end of the sequence hold kBoundary.
  using Context = std::vector<TokenId>;
  static constexpr TokenId kBoundary = -1;

  static absl::StatusOr<NGramMLM> Train(const Corpus& corpus, int order,
                                        double alpha = kDefaultAlpha);

  // One distribution per masked position, in masked_positions() order.
  // Masked neighbors read as <unk>, so no held-out token shapes a prediction.
  std::vector<Distribution> PredictMasked(const MaskedExample& example) const;

  // (count(context, k) + alpha) / (count(context) + alpha * |V|).
  Distribution PredictAt(std::span<const TokenId> tokens,
                         std::size_t position) const;

  // Deterministic text form:
  //   ngram-mlm v1 order=<n> alpha=<a> vocab=<size>
  //   <one vocabulary token per line, by id>
  //   <2n context ids, '_' for boundary> <token id> <count>
  // Count lines are sorted by (context ids, token id).
  std::string Serialize() const;
  static absl::StatusOr<NGramMLM> Deserialize(std::string_view text);

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const Vocabulary& vocab() const { return vocab_; }
  std::size_t context_count() const { return counts_.size(); }

  friend bool operator==(const NGramMLM&, const NGramMLM&) = default;

 private:
  struct ContextCounts {
    std::map<TokenId, std::int64_t> by_token;
    std::int64_t total = 0;

    friend bool operator==(const ContextCounts&,
                           const ContextCounts&) = default;
  };

  NGramMLM(Vocabulary vocab, int order, double alpha)
      : vocab_(std::move(vocab)), order_(order), alpha_(alpha) {}

  Context ContextAt(std::span<const TokenId> tokens,
                    std::size_t position) const;

  Vocabulary vocab_;
  int order_;
  double alpha_;
  std::map<Context, ContextCounts> counts_;
};

}  // namespace dpdecode

#endif  // DPDECODE_TOY_MLM_H_
