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

#ifndef DPDECODE_MASKED_EXAMPLE_H_
#define DPDECODE_MASKED_EXAMPLE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpdecode/simplex.h"

namespace dpdecode {

// Id 0 of every corpus vocabulary. Masked positions are stored as this id so
// the model never sees the held-out token.
inline constexpr TokenId kUnknownTokenId = 0;

// A token sequence with z >= 0 positions hidden for prediction.
class MaskedExample {
 public:
  // `tokens` is the full sequence; the tokens at `masked_positions` become
  // the held-out originals and are replaced by kUnknownTokenId. Positions
  // must be strictly increasing and in range.
  static absl::StatusOr<MaskedExample> FromFullSequence(
      std::vector<TokenId> tokens, std::vector<std::size_t> masked_positions);

  // For inputs whose masked tokens are not known (e.g. text with <mask>
  // placeholders). Masked entries of `tokens` are overwritten with
  // kUnknownTokenId and originals() is empty.
  static absl::StatusOr<MaskedExample> Unlabeled(
      std::vector<TokenId> tokens, std::vector<std::size_t> masked_positions);

  std::span<const TokenId> tokens() const { return tokens_; }
  std::span<const std::size_t> masked_positions() const {
    return masked_positions_;
  }
  // Empty for unlabeled examples; otherwise aligned with masked_positions().
  std::span<const TokenId> originals() const { return originals_; }
  bool has_originals() const { return originals_.size() == mask_count(); }
  std::size_t mask_count() const { return masked_positions_.size(); }
  std::size_t size() const { return tokens_.size(); }
  bool is_masked(std::size_t position) const;

 private:
  MaskedExample(std::vector<TokenId> tokens,
                std::vector<std::size_t> masked_positions,
                std::vector<TokenId> originals)
      : tokens_(std::move(tokens)),
        masked_positions_(std::move(masked_positions)),
        originals_(std::move(originals)) {}

  std::vector<TokenId> tokens_;
  std::vector<std::size_t> masked_positions_;
  std::vector<TokenId> originals_;
};

}  // namespace dpdecode

#endif  // DPDECODE_MASKED_EXAMPLE_H_
