// vivet/commands.hpp
//
// Copyright 2026  The vivet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Command implementations behind the command-line tool, callable directly
// from tests.  Each command validates inputs, writes only under its output
// location, and is idempotent given the same inputs.

#ifndef VIVET_COMMANDS_HPP_
#define VIVET_COMMANDS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "vivet/config.hpp"
#include "vivet/corpus.hpp"
#include "vivet/train.hpp"

namespace vivet {

// Environment variable naming the default run root; relative output paths
// are resolved against it when set.
inline constexpr const char *kRunRootEnv = "VIVET_RUN_ROOT";

std::string ResolveRunPath(const std::string &path);

// Config section readers; every key has the desk-scale default.
CorpusConfig CorpusConfigFrom(const Config &cfg);
FbankConfig FbankConfigFrom(const Config &cfg);
AugmentPolicy PolicyFrom(const Config &cfg);
NetConfig NetConfigFrom(const Config &cfg);
TrainConfig TrainConfigFrom(const Config &cfg);

struct SynthCorpusOptions {
  std::string config_path;  // optional; defaults throughout
  std::string out_dir;
  std::optional<uint64_t> seed;
};
int CmdSynthCorpus(const SynthCorpusOptions &opt);

struct TrainOptions {
  std::string config_path;
  std::string corpus_dir;
  std::string out_dir;
  std::optional<uint64_t> seed;
};
int CmdTrain(const TrainOptions &opt);

struct ExtractOptions {
  std::string config_path;
  std::string checkpoint;
  std::string corpus_dir;
  std::string out_path;
  std::string condition;  // "original" (default) or "type:snr"
};
int CmdExtract(const ExtractOptions &opt);

struct ScoreOptions {
  std::string embeddings_path;
  std::string trials_path;
  std::string out_path;
};
int CmdScore(const ScoreOptions &opt);

struct EvalOptions {
  std::string config_path;
  std::string checkpoint;
  std::string corpus_dir;
  std::string out_dir;
  std::vector<int> snrs = {0, 5, 10, 15, 20};
};
int CmdEval(const EvalOptions &opt);

struct DetOptions {
  std::string scores_path;
  std::string out_path;
};
int CmdDet(const DetOptions &opt);

struct ReportOptions {
  std::vector<std::string> run_dirs;  // first one is the baseline
  std::string out_path;               // optional copy of the printed table
};
int CmdReport(const ReportOptions &opt);

struct PairedMseOptions {
  std::string config_path;
  std::string checkpoint;
  std::string corpus_dir;
  uint64_t seed = 7;
};
int CmdPairedMse(const PairedMseOptions &opt);

}  // namespace vivet

#endif  // VIVET_COMMANDS_HPP_
