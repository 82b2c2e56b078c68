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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpdecode/accountant.h"
#include "dpdecode/dp_verifier.h"
#include "dpdecode/eval_harness.h"
#include "dpdecode/format.h"
#include "dpdecode/masked_example.h"
#include "dpdecode/sampler.h"
#include "dpdecode/simplex.h"
#include "dpdecode/toy_mlm.h"

namespace dpdecode::cli {
namespace {

constexpr std::string_view kMaskToken = "<mask>";

// Failure carrying the exit code it maps to.
struct CommandError {
  int exit_code;
  std::string message;
};

template <typename T>
using Result = std::variant<T, CommandError>;

CommandError UsageError(std::string message) {
  return {kExitUsage, std::move(message)};
}
CommandError IoError(std::string message) {
  return {kExitIo, std::move(message)};
}
CommandError FromStatus(const absl::Status& status, int exit_code) {
  return {exit_code, std::string(status.message())};
}

std::optional<CommandError> ReadFile(const std::string& path,
                                     std::string* contents) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return IoError("error reading '" + path + "'");
  *contents = buf.str();
  return std::nullopt;
}

std::optional<CommandError> WriteOutput(const std::string& path,
                                        const std::string& contents,
                                        std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
    return std::nullopt;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) return IoError("cannot open '" + path + "' for writing");
  file << contents;
  file.close();
  if (!file) return IoError("error writing '" + path + "'");
  return std::nullopt;
}

std::optional<CommandError> LoadModel(const std::string& path,
                                      std::optional<NGramMLM>* model) {
  std::string text;
  if (auto e = ReadFile(path, &text)) return e;
  absl::StatusOr<NGramMLM> parsed = NGramMLM::Deserialize(text);
  if (!parsed.ok()) {
    return IoError("model '" + path + "': " + std::string(parsed.status().message()));
  }
  model->emplace(*std::move(parsed));
  return std::nullopt;
}

absl::StatusOr<std::vector<std::int64_t>> ParseIntList(const std::string& text) {
  std::vector<std::int64_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      return absl::InvalidArgumentError("bad integer '" + item + "' in '" +
                                        text + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) return absl::InvalidArgumentError("empty integer list");
  return values;
}

struct TrainFlags {
  std::string corpus_path;
  std::string output_path;
  int order = 1;
  double alpha = kDefaultAlpha;
};

struct SweepFlags {
  std::string corpus_path;
  std::string model_path;
  std::string output_path;
  std::string lambdas;
  std::string pooling = "token";
  int order = 1;
  double alpha = kDefaultAlpha;
  int restarts = 3;
  std::uint64_t seed = 0;
  double mask_rate = kDefaultMaskRate;
};

struct DecodeFlags {
  std::string model_path;
  std::string input_path;
  std::string output_path;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::int64_t cap = 0;
  bool audit = false;
};

struct AccountFlags {
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::size_t vocab = 0;
  // Fractional values are averages and only make sense with --lambda.
  double t = 1;
};

struct VerifyFlags {
  std::string vocab_sizes = "2,3,4,8";
  std::string positions = "1,2,3,4";
  std::string lambdas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.99";
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
};

Result<std::string> RunTrain(const TrainFlags& flags) {
  std::string text;
  if (auto e = ReadFile(flags.corpus_path, &text)) return *e;
  absl::StatusOr<Corpus> corpus = BuildVocabAndTokenize(text);
  if (!corpus.ok()) return FromStatus(corpus.status(), kExitUsage);
  absl::StatusOr<NGramMLM> model =
      NGramMLM::Train(*corpus, flags.order, flags.alpha);
  if (!model.ok()) return FromStatus(model.status(), kExitUsage);
  return model->Serialize();
}

Result<std::string> RunSweep(const SweepFlags& flags) {
  if (!(flags.mask_rate > 0.0 && flags.mask_rate < 1.0)) {
    return UsageError("--mask-rate must lie in (0, 1)");
  }
  SweepOptions options;
  options.restarts = flags.restarts;
  options.base_seed = flags.seed;
  options.mask_rate = flags.mask_rate;
  if (flags.pooling == "token") {
    options.pooling = PerplexityPooling::kTokenPooled;
  } else if (flags.pooling == "example") {
    options.pooling = PerplexityPooling::kExampleAveraged;
  } else {
    return UsageError("--pooling must be 'token' or 'example'");
  }
  if (flags.lambdas.empty()) {
    options.lambdas = DefaultLambdaGrid();
  } else {
    absl::StatusOr<std::vector<double>> grid = ParseLambdaGrid(flags.lambdas);
    if (!grid.ok()) return FromStatus(grid.status(), kExitUsage);
    options.lambdas = *std::move(grid);
  }

  std::string text;
  if (auto e = ReadFile(flags.corpus_path, &text)) return *e;
  std::optional<NGramMLM> model;
  std::optional<Corpus> corpus;
  if (!flags.model_path.empty()) {
    if (auto e = LoadModel(flags.model_path, &model)) return *e;
    absl::StatusOr<Corpus> encoded = TokenizeWithVocab(text, model->vocab());
    if (!encoded.ok()) return FromStatus(encoded.status(), kExitUsage);
    corpus.emplace(*std::move(encoded));
  } else {
    absl::StatusOr<Corpus> built = BuildVocabAndTokenize(text);
    if (!built.ok()) return FromStatus(built.status(), kExitUsage);
    corpus.emplace(*std::move(built));
    absl::StatusOr<NGramMLM> trained =
        NGramMLM::Train(*corpus, flags.order, flags.alpha);
    if (!trained.ok()) return FromStatus(trained.status(), kExitUsage);
    model.emplace(*std::move(trained));
  }

  absl::StatusOr<std::vector<SweepRecord>> records =
      Sweep(*corpus, *model, options);
  if (!records.ok()) return FromStatus(records.status(), kExitUsage);
  return SweepToCsv(*records);
}

struct DecodeOutcome {
  std::string artifact;
  std::optional<CommandError> refusal;
};

Result<DecodeOutcome> RunDecode(const DecodeFlags& flags) {
  std::optional<NGramMLM> model;
  if (auto e = LoadModel(flags.model_path, &model)) return *e;
  std::string text;
  if (auto e = ReadFile(flags.input_path, &text)) return *e;

  struct Line {
    std::vector<std::string> tokens;
    MaskedExample example;
  };
  std::vector<Line> lines;
  std::int64_t total_masks = 0;
  std::stringstream ss(text);
  std::string raw;
  while (std::getline(ss, raw)) {
    std::vector<std::string> tokens = TokenizeLine(raw);
    if (tokens.empty()) continue;
    std::vector<std::size_t> masked;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] == kMaskToken) masked.push_back(i);
    }
    absl::StatusOr<MaskedExample> example =
        MaskedExample::Unlabeled(Encode(model->vocab(), tokens), masked);
    if (!example.ok()) return FromStatus(example.status(), kExitUsage);
    total_masks += static_cast<std::int64_t>(masked.size());
    lines.push_back({std::move(tokens), *std::move(example)});
  }

  const std::int64_t cap =
      flags.cap > 0 ? flags.cap : std::max<std::int64_t>(total_masks, 1);
  absl::StatusOr<PerturbationParams> params =
      PerturbationParams::Create(flags.lambda);
  if (!params.ok()) return FromStatus(params.status(), kExitUsage);
  absl::StatusOr<PrivacyAccount> account =
      PrivacyAccount::Create(model->vocab().size(), flags.lambda, cap);
  if (!account.ok()) return FromStatus(account.status(), kExitUsage);
  absl::StatusOr<DecodeSession> session = DecodeSession::Create(
      model->vocab(), *params, *std::move(account), flags.seed,
      {.retain_distributions = flags.audit});
  if (!session.ok()) return FromStatus(session.status(), kExitUsage);

  DecodeOutcome outcome;
  std::int64_t decoded = 0;
  for (Line& line : lines) {
    std::vector<Distribution> q = model->PredictMasked(line.example);
    absl::StatusOr<DecodeResult> result = session->Decode(line.example, q);
    if (!result.ok()) {
      if (absl::IsResourceExhausted(result.status())) {
        outcome.refusal =
            CommandError{kExitFailure,
                         "stopped before example " + std::to_string(decoded + 1) +
                             ": " + std::string(result.status().message())};
        break;
      }
      return FromStatus(result.status(), kExitUsage);
    }
    for (const auto& [position, token] : result->filled_tokens) {
      line.tokens[position] = model->vocab().token(token);
    }
    std::string filled;
    for (std::size_t i = 0; i < line.tokens.size(); ++i) {
      if (i > 0) filled += ' ';
      filled += line.tokens[i];
    }
    outcome.artifact += filled + "\n";
    if (result->per_position_distributions) {
      for (std::size_t i = 0; i < result->per_position_distributions->size();
           ++i) {
        const PerturbedDistribution& d = (*result->per_position_distributions)[i];
        outcome.artifact += "# audit position=" +
                            std::to_string(line.example.masked_positions()[i]) +
                            " mass=";
        for (std::size_t k = 0; k < d.size(); ++k) {
          if (k > 0) outcome.artifact += ',';
          outcome.artifact += FormatSignificant(d[k], 6);
        }
        outcome.artifact += "\n";
      }
    }
    ++decoded;
  }
  const PrivacyAccount& spent = session->account();
  outcome.artifact += "# examples=" + std::to_string(decoded) +
                      " tokens=" + std::to_string(spent.predictions_made()) +
                      " cap=" + std::to_string(spent.cap()) +
                      " lambda=" + FormatSignificant(flags.lambda, 6) +
                      " vocab=" + std::to_string(spent.vocab_size()) +
                      " epsilon_spent=" + spent.cumulative_epsilon().ToString() +
                      "\n";
  return outcome;
}

Result<std::string> RunAccount(const AccountFlags& flags) {
  if (flags.lambda.has_value() == flags.epsilon.has_value()) {
    return UsageError("give exactly one of --lambda and --epsilon");
  }
  if (flags.lambda) {
    absl::StatusOr<Epsilon> eps =
        ReportedEpsilon(*flags.lambda, flags.vocab, flags.t);
    if (!eps.ok()) return FromStatus(eps.status(), kExitUsage);
    return "epsilon=" + eps->ToString() + "\n";
  }
  if (flags.t != std::floor(flags.t)) {
    return UsageError("--t must be a whole number with --epsilon");
  }
  absl::StatusOr<double> lambda = LambdaForEpsilon(
      *flags.epsilon, flags.vocab, static_cast<std::int64_t>(flags.t));
  if (!lambda.ok()) return FromStatus(lambda.status(), kExitUsage);
  return "lambda=" + FormatSignificant(*lambda, 4) + "\n";
}

struct VerifyOutcome {
  std::string report;
  bool all_ok;
};

Result<VerifyOutcome> RunVerify(const VerifyFlags& flags) {
  absl::StatusOr<std::vector<std::int64_t>> vocab_sizes =
      ParseIntList(flags.vocab_sizes);
  if (!vocab_sizes.ok()) return FromStatus(vocab_sizes.status(), kExitUsage);
  absl::StatusOr<std::vector<std::int64_t>> positions =
      ParseIntList(flags.positions);
  if (!positions.ok()) return FromStatus(positions.status(), kExitUsage);
  absl::StatusOr<std::vector<double>> lambdas = ParseLambdaGrid(flags.lambdas);
  if (!lambdas.ok()) return FromStatus(lambdas.status(), kExitUsage);

  VerifyOutcome outcome{.report = "", .all_ok = true};
  const Rng root(flags.seed);
  std::uint64_t cell = 0;
  for (std::int64_t v : *vocab_sizes) {
    for (std::int64_t z : *positions) {
      if (v < 2 || z < 0) return UsageError("vocab sizes must be >= 2, z >= 0");
      for (double lambda : *lambdas) {
        Rng rng = root.Split(cell++);
        absl::StatusOr<VerificationSummary> summary =
            VerifyDp(static_cast<std::size_t>(v), static_cast<std::size_t>(z),
                     lambda, flags.trials, rng);
        if (!summary.ok()) return FromStatus(summary.status(), kExitUsage);
        outcome.all_ok = outcome.all_ok && summary->ok();
        outcome.report +=
            "vocab=" + std::to_string(v) + " z=" + std::to_string(z) +
            " lambda=" + FormatSignificant(lambda, 6) +
            " bound=" + FormatSignificant(summary->theoretical_bound, 10) +
            " max_log_ratio=" + FormatSignificant(summary->max_log_ratio, 10) +
            " min_random_slack=" +
            FormatSignificant(summary->min_random_slack, 6) +
            " pairs=" + std::to_string(summary->pairs_checked) + " " +
            (summary->ok() ? "ok" : (summary->bounded ? "NOT-TIGHT" : "VIOLATION")) +
            "\n";
      }
    }
  }
  return outcome;
}

int Report(const CommandError& e, std::ostream& err) {
  err << "dpdecode: " << e.message << "\n";
  return e.exit_code;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Differentially private decoding for masked language models"};
  app.name("dpdecode");
  app.require_subcommand(1);

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train and save an n-gram MLM");
  train_cmd->add_option("--corpus", train.corpus_path, "Training text, one example per line")->required();
  train_cmd->add_option("--output,-o", train.output_path, "Model file to write")->required();
  train_cmd->add_option("--order", train.order, "Context radius in tokens")->check(CLI::PositiveNumber);
  train_cmd->add_option("--alpha", train.alpha, "Additive smoothing constant")->check(CLI::PositiveNumber);

  SweepFlags sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Privacy-utility sweep over lambda, written as CSV");
  sweep_cmd->add_option("--corpus", sweep.corpus_path, "Evaluation text, one example per line")->required();
  sweep_cmd->add_option("--model", sweep.model_path, "Trained model (default: train on --corpus)");
  sweep_cmd->add_option("--lambdas", sweep.lambdas, "List 'a,b,c' or range 'start:stop:step' (default 0,0.1,...,1)");
  sweep_cmd->add_option("--restarts", sweep.restarts, "Maskings averaged per lambda")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep.seed, "Base seed; restart r uses seed + r");
  sweep_cmd->add_option("--mask-rate", sweep.mask_rate, "Per-token masking probability");
  sweep_cmd->add_option("--pooling", sweep.pooling, "Perplexity pooling: token or example");
  sweep_cmd->add_option("--order", sweep.order, "Context radius when training on the fly")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--alpha", sweep.alpha, "Smoothing when training on the fly")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--output,-o", sweep.output_path, "CSV path (default stdout)");

  DecodeFlags decode;
  CLI::App* decode_cmd = app.add_subcommand("decode", "Fill <mask> tokens by perturbed sampling");
  decode_cmd->add_option("--model", decode.model_path, "Trained model file")->required();
  decode_cmd->add_option("--input", decode.input_path, "Text with <mask> placeholders, one example per line")->required();
  decode_cmd->add_option("--lambda", decode.lambda, "Interpolation weight in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  decode_cmd->add_option("--seed", decode.seed, "Sampling seed");
  decode_cmd->add_option("--cap", decode.cap, "Token budget T for the session (default: all masks in the input)")->check(CLI::PositiveNumber);
  decode_cmd->add_flag("--audit", decode.audit, "Also write each perturbed distribution (voids the privacy guarantee)");
  decode_cmd->add_option("--output,-o", decode.output_path, "Output path (default stdout)");

  AccountFlags account;
  CLI::App* account_cmd = app.add_subcommand("account", "Privacy loss for lambda, or lambda for a target loss");
  account_cmd->add_option("--lambda", account.lambda, "Interpolation weight in [0, 1]")->check(CLI::Range(0.0, 1.0));
  account_cmd->add_option("--epsilon", account.epsilon, "Target privacy loss in nats")->check(CLI::NonNegativeNumber);
  account_cmd->add_option("--vocab", account.vocab, "Vocabulary size |V|")->required()->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  account_cmd->add_option("--t", account.t, "Tokens predicted per input, or their average")->check(CLI::NonNegativeNumber);

  VerifyFlags verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Exhaustively check the privacy bound on small instances");
  verify_cmd->add_option("--vocab", verify.vocab_sizes, "Comma-separated vocabulary sizes (<= 8)");
  verify_cmd->add_option("--z", verify.positions, "Comma-separated masked-position counts (<= 4)");
  verify_cmd->add_option("--lambdas", verify.lambdas, "Lambda list or range, each < 1");
  verify_cmd->add_option("--trials", verify.trials, "Random pairs per cell")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify.seed, "Seed for random pairs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*train_cmd) {
    Result<std::string> r = RunTrain(train);
    if (auto* e = std::get_if<CommandError>(&r)) return Report(*e, err);
    if (auto e = WriteOutput(train.output_path, std::get<std::string>(r), out)) {
      return Report(*e, err);
    }
    return kExitOk;
  }
  if (*sweep_cmd) {
    Result<std::string> r = RunSweep(sweep);
    if (auto* e = std::get_if<CommandError>(&r)) return Report(*e, err);
    if (auto e = WriteOutput(sweep.output_path, std::get<std::string>(r), out)) {
      return Report(*e, err);
    }
    return kExitOk;
  }
  if (*decode_cmd) {
    Result<DecodeOutcome> r = RunDecode(decode);
    if (auto* e = std::get_if<CommandError>(&r)) return Report(*e, err);
    const DecodeOutcome& outcome = std::get<DecodeOutcome>(r);
    if (auto e = WriteOutput(decode.output_path, outcome.artifact, out)) {
      return Report(*e, err);
    }
    return outcome.refusal ? Report(*outcome.refusal, err) : kExitOk;
  }
  if (*account_cmd) {
    Result<std::string> r = RunAccount(account);
    if (auto* e = std::get_if<CommandError>(&r)) return Report(*e, err);
    out << std::get<std::string>(r);
    return kExitOk;
  }
  Result<VerifyOutcome> r = RunVerify(verify);
  if (auto* e = std::get_if<CommandError>(&r)) return Report(*e, err);
  const VerifyOutcome& outcome = std::get<VerifyOutcome>(r);
  out << outcome.report;
  if (!outcome.all_ok) {
    err << "dpdecode: privacy bound violated\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace dpdecode::cli
