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

#include "dpdecode/masked_example.h"

#include <algorithm>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpdecode {
namespace {

absl::Status ValidatePositions(std::span<const std::size_t> positions,
                               std::size_t length) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] >= length) {
      return absl::InvalidArgumentError(absl::StrCat(
          "masked position ", positions[i], " out of range for length ",
          length));
    }
    if (i > 0 && positions[i] <= positions[i - 1]) {
      return absl::InvalidArgumentError(
          "masked positions must be strictly increasing");
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<MaskedExample> MaskedExample::FromFullSequence(
    std::vector<TokenId> tokens, std::vector<std::size_t> masked_positions) {
  if (absl::Status s = ValidatePositions(masked_positions, tokens.size());
      !s.ok()) {
    return s;
  }
  std::vector<TokenId> originals;
  originals.reserve(masked_positions.size());
  for (std::size_t p : masked_positions) {
    originals.push_back(tokens[p]);
    tokens[p] = kUnknownTokenId;
  }
  return MaskedExample(std::move(tokens), std::move(masked_positions),
                       std::move(originals));
}

absl::StatusOr<MaskedExample> MaskedExample::Unlabeled(
    std::vector<TokenId> tokens, std::vector<std::size_t> masked_positions) {
  if (absl::Status s = ValidatePositions(masked_positions, tokens.size());
      !s.ok()) {
    return s;
  }
  for (std::size_t p : masked_positions) tokens[p] = kUnknownTokenId;
  return MaskedExample(std::move(tokens), std::move(masked_positions), {});
}

bool MaskedExample::is_masked(std::size_t position) const {
  return std::binary_search(masked_positions_.begin(), masked_positions_.end(),
                            position);
}

}  // namespace dpdecode
