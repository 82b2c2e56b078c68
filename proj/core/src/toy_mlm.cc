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

#include "dpdecode/toy_mlm.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>
#include <unordered_map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "text_util.h"

namespace dpdecode {
namespace {

constexpr std::string_view kModelMagic = "ngram-mlm";
constexpr std::string_view kModelVersion = "v1";

std::string ShortestDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

absl::StatusOr<std::string_view> HeaderField(std::string_view field,
                                             std::string_view key) {
  if (!field.starts_with(key) || field.substr(key.size(), 1) != "=") {
    return absl::InvalidArgumentError(
        absl::StrCat("model header: expected ", std::string(key),
                     "=..., got '", std::string(field), "'"));
  }
  return field.substr(key.size() + 1);
}

}  // namespace

std::vector<std::string> TokenizeLine(std::string_view line) {
  std::vector<std::string> tokens;
  for (std::string_view piece : internal::Split(line, " \t\n\r\v\f", true)) {
    std::string t(piece);
    absl::AsciiStrToLower(&t);
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& e : examples) n += e.size();
  return n;
}

absl::StatusOr<Corpus> BuildVocabAndTokenize(std::string_view raw_text) {
  std::vector<std::vector<std::string>> lines;
  std::unordered_map<std::string, std::int64_t> frequency;
  for (std::string_view line : internal::Split(raw_text, "\n", false)) {
    std::vector<std::string> tokens = TokenizeLine(line);
    if (tokens.empty()) continue;
    for (const std::string& t : tokens) {
      if (t != kUnknownToken) ++frequency[t];
    }
    lines.push_back(std::move(tokens));
  }
  if (lines.empty()) {
    return absl::InvalidArgumentError("corpus text contains no tokens");
  }

  std::vector<std::pair<std::string, std::int64_t>> ranked(frequency.begin(),
                                                           frequency.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens;
  tokens.reserve(ranked.size() + 1);
  tokens.emplace_back(kUnknownToken);
  for (auto& [token, unused] : ranked) tokens.push_back(std::move(token));
  if (tokens.size() < 2) {
    return absl::InvalidArgumentError(
        "corpus needs at least one token besides <unk>");
  }
  absl::StatusOr<Vocabulary> vocab = Vocabulary::Create(std::move(tokens));
  if (!vocab.ok()) return vocab.status();

  Corpus corpus{.vocab = *std::move(vocab), .examples = {}};
  corpus.examples.reserve(lines.size());
  for (const auto& line : lines) {
    corpus.examples.push_back(Encode(corpus.vocab, line));
  }
  return corpus;
}

absl::StatusOr<Corpus> TokenizeWithVocab(std::string_view raw_text,
                                         const Vocabulary& vocab) {
  Corpus corpus{.vocab = vocab, .examples = {}};
  for (std::string_view line : internal::Split(raw_text, "\n", false)) {
    std::vector<std::string> tokens = TokenizeLine(line);
    if (tokens.empty()) continue;
    corpus.examples.push_back(Encode(vocab, tokens));
  }
  if (corpus.examples.empty()) {
    return absl::InvalidArgumentError("corpus text contains no tokens");
  }
  return corpus;
}

std::vector<TokenId> Encode(const Vocabulary& vocab,
                            std::span<const std::string> tokens) {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) {
    ids.push_back(vocab.Find(t).value_or(kUnknownTokenId));
  }
  return ids;
}

absl::StatusOr<std::vector<MaskedExample>> MaskCorpus(const Corpus& corpus,
                                                      double rate, Rng& rng) {
  if (!(rate > 0.0 && rate < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mask rate must lie in (0, 1), got ", rate));
  }
  std::vector<std::vector<std::size_t>> positions(corpus.examples.size());
  for (std::size_t e = 0; e < corpus.examples.size(); ++e) {
    for (std::size_t p = 0; p < corpus.examples[e].size(); ++p) {
      if (rng.Uniform01() < rate) positions[e].push_back(p);
    }
  }
  return MaskCorpusAt(corpus, positions);
}

absl::StatusOr<std::vector<MaskedExample>> MaskCorpusAt(
    const Corpus& corpus, std::span<const std::vector<std::size_t>> positions) {
  if (positions.size() != corpus.examples.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", positions.size(), " position lists for ",
                     corpus.examples.size(), " examples"));
  }
  std::vector<MaskedExample> masked;
  masked.reserve(corpus.examples.size());
  for (std::size_t e = 0; e < corpus.examples.size(); ++e) {
    absl::StatusOr<MaskedExample> example =
        MaskedExample::FromFullSequence(corpus.examples[e], positions[e]);
    if (!example.ok()) return example.status();
    masked.push_back(*std::move(example));
  }
  return masked;
}

absl::StatusOr<NGramMLM> NGramMLM::Train(const Corpus& corpus, int order,
                                         double alpha) {
  if (order < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be at least 1, got ", order));
  }
  if (!(alpha > 0.0) || std::isinf(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrCat("smoothing alpha must be positive and finite, got ",
                     alpha));
  }
  NGramMLM model(corpus.vocab, order, alpha);
  const auto vocab_size = static_cast<TokenId>(corpus.vocab.size());
  for (const auto& example : corpus.examples) {
    for (std::size_t p = 0; p < example.size(); ++p) {
      if (example[p] < 0 || example[p] >= vocab_size) {
        return absl::InvalidArgumentError(
            absl::StrCat("token id ", example[p], " outside vocabulary"));
      }
      ContextCounts& c = model.counts_[model.ContextAt(example, p)];
      ++c.by_token[example[p]];
      ++c.total;
    }
  }
  return model;
}

NGramMLM::Context NGramMLM::ContextAt(std::span<const TokenId> tokens,
                                      std::size_t position) const {
  Context context;
  context.reserve(2 * order_);
  const auto n = static_cast<std::ptrdiff_t>(tokens.size());
  const auto p = static_cast<std::ptrdiff_t>(position);
  for (std::ptrdiff_t i = p - order_; i < p; ++i) {
    context.push_back(i >= 0 ? tokens[i] : kBoundary);
  }
  for (std::ptrdiff_t i = p + 1; i <= p + order_; ++i) {
    context.push_back(i < n ? tokens[i] : kBoundary);
  }
  return context;
}

Distribution NGramMLM::PredictAt(std::span<const TokenId> tokens,
                                 std::size_t position) const {
  const std::size_t v = vocab_.size();
  auto it = counts_.find(ContextAt(tokens, position));
  if (it == counts_.end()) return Distribution::Uniform(v);

  const ContextCounts& c = it->second;
  const double denominator =
      static_cast<double>(c.total) + alpha_ * static_cast<double>(v);
  std::vector<double> mass(v, alpha_ / denominator);
  for (const auto& [token, count] : c.by_token) {
    mass[token] = (static_cast<double>(count) + alpha_) / denominator;
  }
  // Deviation from 1 is rounding only.
  return *Distribution::Create(std::move(mass));
}

std::vector<Distribution> NGramMLM::PredictMasked(
    const MaskedExample& example) const {
  std::vector<Distribution> out;
  out.reserve(example.mask_count());
  for (std::size_t p : example.masked_positions()) {
    out.push_back(PredictAt(example.tokens(), p));
  }
  return out;
}

std::string NGramMLM::Serialize() const {
  std::string out = absl::StrCat(std::string(kModelMagic), " ",
                                 std::string(kModelVersion),
                                 " order=", order_,
                                 " alpha=", ShortestDouble(alpha_),
                                 " vocab=", vocab_.size(), "\n");
  for (const std::string& token : vocab_.tokens()) {
    absl::StrAppend(&out, token, "\n");
  }
  for (const auto& [context, counts] : counts_) {
    std::string key;
    for (std::size_t i = 0; i < context.size(); ++i) {
      if (i > 0) key += ' ';
      if (context[i] == kBoundary) {
        key += '_';
      } else {
        absl::StrAppend(&key, context[i]);
      }
    }
    for (const auto& [token, count] : counts.by_token) {
      absl::StrAppend(&out, key, " ", token, " ", count, "\n");
    }
  }
  return out;
}

absl::StatusOr<NGramMLM> NGramMLM::Deserialize(std::string_view text) {
  std::vector<std::string_view> lines = internal::Split(text, "\n", false);
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) return absl::InvalidArgumentError("empty model file");

  std::vector<std::string_view> header =
      internal::Split(lines[0], " ", true);
  if (header.size() != 5 || header[0] != kModelMagic) {
    return absl::InvalidArgumentError("not an ngram-mlm model file");
  }
  if (header[1] != kModelVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported model version ", std::string(header[1])));
  }
  absl::StatusOr<std::string_view> order_field = HeaderField(header[2], "order");
  absl::StatusOr<std::string_view> alpha_field = HeaderField(header[3], "alpha");
  absl::StatusOr<std::string_view> vocab_field = HeaderField(header[4], "vocab");
  if (!order_field.ok()) return order_field.status();
  if (!alpha_field.ok()) return alpha_field.status();
  if (!vocab_field.ok()) return vocab_field.status();
  int order = 0;
  double alpha = 0.0;
  std::size_t vocab_size = 0;
  if (!internal::ParseNumber(*order_field, &order) ||
      !internal::ParseNumber(*alpha_field, &alpha) ||
      !internal::ParseNumber(*vocab_field, &vocab_size)) {
    return absl::InvalidArgumentError("model header: malformed number");
  }
  if (order < 1 || !(alpha > 0.0)) {
    return absl::InvalidArgumentError("model header: invalid order or alpha");
  }
  if (lines.size() < 1 + vocab_size) {
    return absl::InvalidArgumentError("model file truncated in vocabulary");
  }
  std::vector<std::string> tokens(lines.begin() + 1,
                                  lines.begin() + 1 + vocab_size);
  absl::StatusOr<Vocabulary> vocab = Vocabulary::Create(std::move(tokens));
  if (!vocab.ok()) return vocab.status();

  NGramMLM model(*std::move(vocab), order, alpha);
  const auto max_id = static_cast<TokenId>(vocab_size);
  for (std::size_t i = 1 + vocab_size; i < lines.size(); ++i) {
    std::vector<std::string_view> fields =
        internal::Split(lines[i], " ", true);
    if (fields.size() != static_cast<std::size_t>(2 * order + 2)) {
      return absl::InvalidArgumentError(
          absl::StrCat("model line ", i + 1, ": expected ", 2 * order + 2,
                       " fields"));
    }
    Context context;
    for (int j = 0; j < 2 * order; ++j) {
      TokenId id = kBoundary;
      if (fields[j] != "_" &&
          (!internal::ParseNumber(fields[j], &id) || id < 0 || id >= max_id)) {
        return absl::InvalidArgumentError(
            absl::StrCat("model line ", i + 1, ": bad context id"));
      }
      context.push_back(id);
    }
    TokenId token = 0;
    std::int64_t count = 0;
    if (!internal::ParseNumber(fields[2 * order], &token) || token < 0 ||
        token >= max_id || !internal::ParseNumber(fields[2 * order + 1], &count) ||
        count < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("model line ", i + 1, ": bad token or count"));
    }
    ContextCounts& c = model.counts_[std::move(context)];
    if (!c.by_token.emplace(token, count).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("model line ", i + 1, ": duplicate entry"));
    }
    c.total += count;
  }
  return model;
}

}  // namespace dpdecode
