// vivet/eval.hpp
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
// Verification evaluation: corrupt the test split under a grid of noise
// conditions, embed every utterance, score the trial list by cosine, and
// report EER and minimum detection cost per condition plus a pooled row.

#ifndef VIVET_EVAL_HPP_
#define VIVET_EVAL_HPP_

#include <map>
#include <string>
#include <vector>

#include "vivet/augment.hpp"
#include "vivet/corpus.hpp"
#include "vivet/metrics.hpp"
#include "vivet/network.hpp"

namespace vivet {

double CosineScore(const std::vector<float> &a, const std::vector<float> &b);

// One evaluation condition: the unmodified test audio, or one noise type at
// one fixed SNR.
struct EvalCondition {
  bool original = true;
  NoiseType type = NoiseType::kMusic;
  int snr_db = 0;

  std::string Name() const;  // "original", "music_5db", ...
};

// Parses "original" or "type:snr" (e.g. "babble:5").
EvalCondition ParseCondition(const std::string &text);

// The standard grid: original, then {babble, music, ambient} at each SNR.
std::vector<EvalCondition> StandardConditions(const std::vector<int> &snrs);

// Test-split features under one condition.  Corruption draws (clip choice,
// babble size, noise placement) depend only on (condition, utt_id), never on
// the training seed, so every system is measured on identical audio.
std::map<std::string, FeatureMatrix> BuildConditionFeatures(
    const PairMaker &maker, const EvalCondition &cond);

// Eval-mode embeddings, one utterance at a time (batch of one keeps batch
// normalization on its running statistics regardless of utterance length).
std::map<std::string, std::vector<float>> ExtractEmbeddings(
    EmbedNet<float> *net, const std::map<std::string, FeatureMatrix> &feats);

// Cosine scores aligned with the trial list; both sides of every trial come
// from the same embedding table.
std::vector<double> ScoreTrials(
    const TrialSet &trials,
    const std::map<std::string, std::vector<float>> &emb);

ScoreSet SplitByLabel(const TrialSet &trials, const std::vector<double> &scores);

struct ConditionResult {
  EvalCondition cond;
  std::string label;  // cond.Name(), or "all" for the pooled row
  double eer = 0.0;
  double min_dcf = 0.0;
  ScoreSet scores;
};

// Runs every condition, writes scores_<name>.txt per condition plus
// metrics.csv (with a pooled "all" row over the noisy conditions) and
// det.csv (pooled detection error tradeoff vertices) under out_dir.
std::vector<ConditionResult> EvaluateConditions(
    const PairMaker &maker, EmbedNet<float> *net, const TrialSet &trials,
    const std::vector<int> &snrs, const std::string &out_dir);

void WriteMetricsCsv(const std::vector<ConditionResult> &rows,
                     const ConditionResult &pooled, const std::string &path);

void WriteDetCsv(const std::vector<DetPoint> &points, const std::string &path);

// "utt_id speaker_id v1 ... vp" per line, nine significant digits.  `suffix`
// is appended to each utterance id (distinguishes corrupted copies).
void DumpEmbeddings(const std::map<std::string, std::vector<float>> &emb,
                    const CorpusManifest &manifest, const std::string &suffix,
                    const std::string &path);

// Inverse of DumpEmbeddings; speaker ids are returned separately.
std::map<std::string, std::vector<float>> ReadEmbeddings(
    const std::string &path, std::map<std::string, std::string> *speakers);

struct MetricsRow {
  std::string condition;
  std::string snr;  // empty for "original" and "all"
  double eer = 0.0;
  double min_dcf = 0.0;
};

std::vector<MetricsRow> ReadMetricsCsv(const std::string &path);

// Relative improvement of `value` over `baseline`, in percent.
double ReductionPercent(double baseline, double value);

}  // namespace vivet

#endif  // VIVET_EVAL_HPP_
