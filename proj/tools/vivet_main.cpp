// vivet_main.cpp
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
// Command-line entry point.  Every experiment is a sequence of these
// commands against a run directory; `--threads 1` (the default) makes each
// command bit-reproducible given (config, seed).

#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "vivet/commands.hpp"

int main(int argc, char **argv) {
  CLI::App app{"speaker embedding training and evaluation toolkit"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads,
                 "worker threads (1 forces reproducible mode)");

  vivet::SynthCorpusOptions synth;
  uint64_t seed_value = 0;
  CLI::App *synth_cmd =
      app.add_subcommand("synth-corpus", "generate the synthetic corpus");
  synth_cmd->add_option("--config", synth.config_path, "experiment config");
  synth_cmd->add_option("--out", synth.out_dir, "corpus directory")
      ->required();
  CLI::Option *synth_seed = synth_cmd->add_option(
      "--seed", seed_value, "overrides corpus.seed from the config");

  vivet::TrainOptions train;
  CLI::App *train_cmd = app.add_subcommand("train", "train one system");
  train_cmd->add_option("--config", train.config_path, "experiment config");
  train_cmd->add_option("--corpus", train.corpus_dir, "corpus directory")
      ->required();
  train_cmd->add_option("--out", train.out_dir, "run directory")->required();
  CLI::Option *train_seed = train_cmd->add_option(
      "--seed", seed_value, "overrides train.seed from the config");

  vivet::ExtractOptions extract;
  CLI::App *extract_cmd =
      app.add_subcommand("extract", "dump test-split embeddings");
  extract_cmd->add_option("--config", extract.config_path, "experiment config");
  extract_cmd->add_option("--checkpoint", extract.checkpoint, "model file")
      ->required();
  extract_cmd->add_option("--corpus", extract.corpus_dir, "corpus directory")
      ->required();
  extract_cmd->add_option("--out", extract.out_path, "embedding file")
      ->required();
  extract_cmd->add_option("--condition", extract.condition,
                          "\"original\" or type:snr, e.g. babble:5");

  vivet::ScoreOptions score;
  CLI::App *score_cmd =
      app.add_subcommand("score", "cosine-score a trial list");
  score_cmd->add_option("--embeddings", score.embeddings_path, "dump file")
      ->required();
  score_cmd->add_option("--trials", score.trials_path, "trial list")
      ->required();
  score_cmd->add_option("--out", score.out_path, "score file")->required();

  vivet::EvalOptions eval;
  CLI::App *eval_cmd =
      app.add_subcommand("eval", "score all noise conditions and report");
  eval_cmd->add_option("--config", eval.config_path, "experiment config");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "model file")
      ->required();
  eval_cmd->add_option("--corpus", eval.corpus_dir, "corpus directory")
      ->required();
  eval_cmd->add_option("--out", eval.out_dir, "eval output directory")
      ->required();
  eval_cmd->add_option("--snrs", eval.snrs, "SNR grid in dB");

  vivet::DetOptions det;
  CLI::App *det_cmd =
      app.add_subcommand("det", "detection error tradeoff from a score file");
  det_cmd->add_option("--scores", det.scores_path, "score file")->required();
  det_cmd->add_option("--out", det.out_path, "DET csv")->required();

  vivet::ReportOptions report;
  CLI::App *report_cmd =
      app.add_subcommand("report", "compare runs side by side");
  report_cmd
      ->add_option("dirs", report.run_dirs,
                   "eval directories; the first is the baseline")
      ->required();
  report_cmd->add_option("--out", report.out_path, "also write the table here");

  vivet::PairedMseOptions paired;
  CLI::App *paired_cmd = app.add_subcommand(
      "paired-mse", "clean/noisy embedding spread of a checkpoint");
  paired_cmd->add_option("--config", paired.config_path, "experiment config");
  paired_cmd->add_option("--checkpoint", paired.checkpoint, "model file")
      ->required();
  paired_cmd->add_option("--corpus", paired.corpus_dir, "corpus directory")
      ->required();
  paired_cmd->add_option("--seed", paired.seed, "pair-selection seed");

  CLI11_PARSE(app, argc, argv);

  try {
    vivet::SetNumThreads(threads);
    if (synth_cmd->parsed()) {
      if (synth_seed->count() > 0) synth.seed = seed_value;
      return vivet::CmdSynthCorpus(synth);
    }
    if (train_cmd->parsed()) {
      if (train_seed->count() > 0) train.seed = seed_value;
      return vivet::CmdTrain(train);
    }
    if (extract_cmd->parsed()) return vivet::CmdExtract(extract);
    if (score_cmd->parsed()) return vivet::CmdScore(score);
    if (eval_cmd->parsed()) return vivet::CmdEval(eval);
    if (det_cmd->parsed()) return vivet::CmdDet(det);
    if (report_cmd->parsed()) return vivet::CmdReport(report);
    if (paired_cmd->parsed()) return vivet::CmdPairedMse(paired);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
