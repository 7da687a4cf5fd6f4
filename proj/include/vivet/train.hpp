// vivet/train.hpp
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
// Dual-update training: each step first applies the identification loss over
// the clean and noisy views jointly, then re-forwards the same batch through
// the updated parameters and applies the within-sample loss over the
// clean/noisy pairs.  Exactly two optimizer applications per step (one when
// the within loss is disabled, or when its value is exactly zero).

#ifndef VIVET_TRAIN_HPP_
#define VIVET_TRAIN_HPP_

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "vivet/augment.hpp"
#include "vivet/corpus.hpp"
#include "vivet/losses.hpp"
#include "vivet/network.hpp"

namespace vivet {

enum class AugMode { kClean, kOffline, kOnline };
enum class WithinLoss { kNone, kMse, kCosine };

const char *AugModeName(AugMode m);
AugMode AugModeFromName(const std::string &name);
const char *WithinLossName(WithinLoss w);
WithinLoss WithinLossFromName(const std::string &name);

struct TrainConfig {
  NetConfig net;
  FbankConfig fbank;
  AugmentPolicy policy;
  AugMode mode = AugMode::kOnline;
  WithinLoss within = WithinLoss::kNone;
  double alpha = 1.0;  // weight on the within-sample loss
  int epochs = 15;
  int batch_size = 16;
  int crop_frames = 98;  // about one second of 10 ms hops
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  // Learning rate multiplies by lr_decay when the epoch index reaches each
  // fraction of the total epoch count.
  std::vector<double> lr_milestones = {0.6, 0.8};
  double lr_decay = 0.1;
  int offline_copies = 1;
  // Angular-head margin annealing: the cosine term's weight decays
  // hyperbolically from lambda_start to lambda_end over the whole run.
  double lambda_start = 1000.0;
  double lambda_end = 5.0;
  // Optional converged softmax-only checkpoint; when set, each epoch log row
  // carries its paired clean/noisy MSE as a fixed reference line.
  std::string reference_checkpoint;
  uint64_t seed = 7;

  void Validate() const;
};

struct EpochLog {
  int epoch = 0;
  double id_loss = 0.0;
  double within_loss = 0.0;
  double lr = 0.0;
  double wall_s = 0.0;
  std::optional<double> reference_mse;
};

struct StepMetrics {
  double id_loss = 0.0;
  double within_loss = 0.0;          // unweighted mean over the pairs
  bool second_update_applied = false;
};

// v <- momentum * v + grad + weight_decay * param; param <- param - lr * v.
// Velocity is tracked per trainable parameter.
class Sgd {
 public:
  Sgd(double lr, double momentum, double weight_decay)
      : lr_(lr), momentum_(momentum), weight_decay_(weight_decay) {}

  void SetLr(double lr) { lr_ = lr; }
  double Lr() const { return lr_; }

  void Step(ParamStore<float> *store);

 private:
  double lr_, momentum_, weight_decay_;
  std::vector<std::vector<float>> velocity_;  // indexed like the store
};

class Trainer {
 public:
  // run_dir may be empty: no provenance log and no diagnostic dumps.
  Trainer(const TrainConfig &cfg, const CorpusManifest &manifest,
          const std::string &run_dir);

  // One optimizer step (or two when the within-sample loss is active).
  StepMetrics TrainStep(const std::vector<PairSample> &batch);

  // Full run over all epochs; returns one log row per epoch.
  std::vector<EpochLog> Run();

  // Builds the pair batch for one (epoch, step) the same way Run does.
  std::vector<PairSample> MakeBatch(int epoch, int step);

  EmbedNet<float> &Net() { return net_; }
  const PairMaker &Maker() const { return maker_; }
  const TrainConfig &Config() const { return cfg_; }
  int StepsPerEpoch() const { return steps_per_epoch_; }

 private:
  void ApplyOptimizer();
  double CurrentLambda() const;
  [[noreturn]] void AbortOnNan(const std::string &what, int epoch, int step);

  TrainConfig cfg_;
  std::string run_dir_;
  PairMaker maker_;
  EmbedNet<float> net_;
  Sgd sgd_;
  RandomStream dropout_rng_;
  RandomStream crop_rng_;
  std::vector<std::string> train_utts_;
  OfflineSet offline_;
  std::map<std::string, FeatureMatrix> offline_features_;
  std::ofstream provenance_;
  int steps_per_epoch_ = 0;
  int64_t steps_done_ = 0;
  int64_t steps_planned_ = 0;
  int cur_epoch_ = 0, cur_step_ = 0;
};

// Eval-mode embedding of one whole utterance (batch of one).
std::vector<float> EmbedUtterance(EmbedNet<float> *net, const FeatureMatrix &fm);

// Mean squared-distance within loss over fixed clean/noisy pairs, eval mode.
double ReferenceMse(EmbedNet<float> *net, const std::vector<PairSample> &pairs);

void WriteEpochLogCsv(const std::vector<EpochLog> &logs, const std::string &path);

// Trains per cfg, writes checkpoint.bin, epoch_log.csv and provenance.jsonl
// under run_dir, and returns the logs.
std::vector<EpochLog> RunTraining(const TrainConfig &cfg,
                                  const CorpusManifest &manifest,
                                  const std::string &run_dir);

}  // namespace vivet

#endif  // VIVET_TRAIN_HPP_
