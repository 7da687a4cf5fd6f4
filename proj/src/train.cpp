// train.cpp
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

#include "vivet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace vivet {

const char *AugModeName(AugMode m) {
  switch (m) {
    case AugMode::kClean: return "clean";
    case AugMode::kOffline: return "offline";
    case AugMode::kOnline: return "online";
  }
  return "?";
}

AugMode AugModeFromName(const std::string &name) {
  if (name == "clean") return AugMode::kClean;
  if (name == "offline") return AugMode::kOffline;
  if (name == "online") return AugMode::kOnline;
  throw Error("unknown augmentation mode: " + name);
}

const char *WithinLossName(WithinLoss w) {
  switch (w) {
    case WithinLoss::kNone: return "none";
    case WithinLoss::kMse: return "mse";
    case WithinLoss::kCosine: return "cosine";
  }
  return "?";
}

WithinLoss WithinLossFromName(const std::string &name) {
  if (name == "none") return WithinLoss::kNone;
  if (name == "mse") return WithinLoss::kMse;
  if (name == "cosine") return WithinLoss::kCosine;
  throw Error("unknown within-sample loss: " + name);
}

void TrainConfig::Validate() const {
  net.Validate();
  policy.Validate();
  Require(epochs >= 1, "TrainConfig: epochs must be positive");
  Require(batch_size >= 1, "TrainConfig: batch_size must be positive");
  Require(crop_frames >= 8, "TrainConfig: crop_frames too small");
  Require(lr > 0.0, "TrainConfig: lr must be positive");
  Require(momentum >= 0.0 && momentum < 1.0,
          "TrainConfig: momentum must be in [0, 1)");
  Require(weight_decay >= 0.0, "TrainConfig: weight_decay must be nonnegative");
  Require(lr_decay > 0.0 && lr_decay <= 1.0,
          "TrainConfig: lr_decay must be in (0, 1]");
  for (double f : lr_milestones)
    Require(f > 0.0 && f < 1.0, "TrainConfig: milestones are epoch fractions");
  Require(alpha >= 0.0, "TrainConfig: alpha must be nonnegative");
  Require(offline_copies >= 1, "TrainConfig: offline_copies must be positive");
  Require(lambda_start >= lambda_end && lambda_end > 0.0,
          "TrainConfig: lambda must anneal downward to a positive floor");
  // A within-sample loss needs a noisy view of every utterance.
  Require(within == WithinLoss::kNone || mode != AugMode::kClean,
          "TrainConfig: within-sample loss requires noisy training views");
}

void Sgd::Step(ParamStore<float> *store) {
  if (velocity_.size() != store->Count()) velocity_.resize(store->Count());
  for (size_t i = 0; i < store->Count(); ++i) {
    Param<float> &p = store->At(static_cast<int>(i));
    if (!p.trainable) continue;
    Require(p.t.g.size() == p.t.v.size(), "Sgd: missing gradient for " + p.name);
    std::vector<float> &v = velocity_[i];
    if (v.size() != p.t.v.size()) v.assign(p.t.v.size(), 0.0f);
    const float m = static_cast<float>(momentum_);
    const float wd = static_cast<float>(weight_decay_);
    const float lr = static_cast<float>(lr_);
    for (size_t d = 0; d < v.size(); ++d) {
      v[d] = m * v[d] + p.t.g[d] + wd * p.t.v[d];
      p.t.v[d] -= lr * v[d];
    }
  }
}

Trainer::Trainer(const TrainConfig &cfg, const CorpusManifest &manifest,
                 const std::string &run_dir)
    : cfg_(cfg),
      run_dir_(run_dir),
      maker_(manifest, cfg.fbank, cfg.policy, cfg.seed),
      net_(cfg.net, cfg.seed),
      sgd_(cfg.lr, cfg.momentum, cfg.weight_decay),
      dropout_rng_(MixSeed({cfg.seed, Fnv1a("dropout")})),
      crop_rng_(MixSeed({cfg.seed, Fnv1a("crop")})) {
  cfg_.Validate();
  Require(cfg_.net.n_classes == static_cast<int>(maker_.Speakers().size()),
          "Trainer: classifier size must equal the train speaker count");
  for (const auto &u : manifest.utterances)
    if (u.split == "train") train_utts_.push_back(u.utt_id);
  Require(static_cast<int>(train_utts_.size()) >= cfg_.batch_size,
          "Trainer: fewer train utterances than one batch");
  steps_per_epoch_ = static_cast<int>(train_utts_.size()) / cfg_.batch_size;
  steps_planned_ =
      static_cast<int64_t>(steps_per_epoch_) * cfg_.epochs;
  if (cfg_.mode == AugMode::kOffline) {
    // The offline set is drawn once up front; epochs then cycle through the
    // same copies verbatim.
    std::vector<FeatureMatrix> feats(train_utts_.size() *
                                     static_cast<size_t>(cfg_.offline_copies));
    offline_.dir = "";
    offline_.entries.resize(feats.size());
    ParallelFor(0, feats.size(), [&](size_t j) {
      size_t ui = j / static_cast<size_t>(cfg_.offline_copies);
      int copy = static_cast<int>(j % static_cast<size_t>(cfg_.offline_copies));
      const std::string &utt = train_utts_[ui];
      RandomStream rng(
          MixSeed({cfg_.seed, Fnv1a("offline"), Fnv1a(utt),
                   static_cast<uint64_t>(copy)}));
      AugmentDraw draw = DrawAugmentation(cfg_.policy, maker_.Manifest(),
                                          "train", &rng);
      size_t fit_offset = 0;
      Waveform noisy = maker_.MixDraw(utt, draw, "train", &rng, &fit_offset);
      feats[j] = LogMel(noisy, cfg_.fbank);
      OfflineEntry &e = offline_.entries[j];
      e.utt_id = utt;
      e.copy = copy;
      e.noise_type = draw.type;
      e.snr_db = draw.snr_db;
      e.noise_ids = draw.noise_ids;
    });
    for (size_t j = 0; j < feats.size(); ++j) {
      const OfflineEntry &e = offline_.entries[j];
      offline_features_[e.utt_id + "#" + ToString(e.copy)] = std::move(feats[j]);
    }
  }
  if (!run_dir_.empty()) {
    std::filesystem::create_directories(run_dir_);
    if (cfg_.mode != AugMode::kClean) {
      provenance_.open(run_dir_ + "/provenance.jsonl");
      Require(provenance_.good(), "Trainer: cannot write provenance log");
    }
  }
}

double Trainer::CurrentLambda() const {
  if (steps_planned_ <= 0) return cfg_.lambda_end;
  double t = static_cast<double>(steps_done_) /
             static_cast<double>(steps_planned_);
  if (t > 1.0) t = 1.0;
  double ratio = cfg_.lambda_start / cfg_.lambda_end;
  return cfg_.lambda_start / (1.0 + (ratio - 1.0) * t);
}

void Trainer::ApplyOptimizer() {
  sgd_.Step(&net_.Store());
  if (cfg_.net.head == HeadType::kASoftmax) net_.NormalizeClassifierRows();
}

void Trainer::AbortOnNan(const std::string &what, int epoch, int step) {
  if (!run_dir_.empty()) {
    std::ofstream dump(run_dir_ + "/nan_dump.txt");
    dump << "non-finite value in " << what << " at epoch " << epoch
         << " step " << step << "\n";
    ParamStore<float> &store = net_.Store();
    for (size_t i = 0; i < store.Count(); ++i) {
      const Param<float> &p = store.At(static_cast<int>(i));
      double vn = 0.0, gn = 0.0;
      for (float x : p.t.v) vn += static_cast<double>(x) * x;
      for (float x : p.t.g) gn += static_cast<double>(x) * x;
      char line[256];
      std::snprintf(line, sizeof(line), "%-40s |w|=%.6e |g|=%.6e\n",
                    p.name.c_str(), std::sqrt(vn), std::sqrt(gn));
      dump << line;
    }
  }
  throw Error("training diverged: non-finite " + what + " at epoch " +
              ToString(epoch) + " step " + ToString(step) +
              (run_dir_.empty() ? "" : " (state in " + run_dir_ + "/nan_dump.txt)"));
}

std::vector<PairSample> Trainer::MakeBatch(int epoch, int step) {
  std::vector<std::string> order = train_utts_;
  RandomStream order_rng(
      MixSeed({cfg_.seed, Fnv1a("order"), static_cast<uint64_t>(epoch)}));
  order_rng.Shuffle(&order);
  Require(step >= 0 && step < steps_per_epoch_, "MakeBatch: step out of range");
  std::vector<PairSample> batch(static_cast<size_t>(cfg_.batch_size));
  size_t base = static_cast<size_t>(step) * cfg_.batch_size;
  if (cfg_.mode == AugMode::kOnline) {
    ParallelFor(0, batch.size(), [&](size_t i) {
      batch[i] = maker_.MakePair(order[base + i], epoch, step);
    });
  } else if (cfg_.mode == AugMode::kClean) {
    for (size_t i = 0; i < batch.size(); ++i)
      batch[i] = maker_.MakeCleanOnly(order[base + i]);
  } else {
    for (size_t i = 0; i < batch.size(); ++i) {
      const std::string &utt = order[base + i];
      RandomStream pick(MixSeed({cfg_.seed, Fnv1a("offlinepick"),
                                 static_cast<uint64_t>(epoch),
                                 static_cast<uint64_t>(step), Fnv1a(utt)}));
      int copy = static_cast<int>(pick.UniformInt(
          static_cast<uint64_t>(cfg_.offline_copies)));
      auto it = offline_features_.find(utt + "#" + ToString(copy));
      Require(it != offline_features_.end(), "MakeBatch: missing offline copy");
      PairSample &p = batch[i];
      p.clean = maker_.CleanFeatures(utt);
      p.noisy = it->second;
      p.speaker_index = maker_.SpeakerIndexOf(utt);
      p.provenance.utt_id = utt;
      p.provenance.epoch = epoch;
      p.provenance.step = step;
      const OfflineEntry &oe = offline_.Find(utt, copy);
      p.provenance.noise_type = oe.noise_type;
      p.provenance.noise_ids = oe.noise_ids;
      p.provenance.snr_db = oe.snr_db;
    }
  }
  return batch;
}

StepMetrics Trainer::TrainStep(const std::vector<PairSample> &batch) {
  Require(!batch.empty(), "TrainStep: empty batch");
  const int b = static_cast<int>(batch.size());
  const bool paired = cfg_.mode != AugMode::kClean;
  const int mels = cfg_.net.n_mels;
  const int crop = cfg_.crop_frames;
  const int n = paired ? 2 * b : b;

  // One crop offset per pair, shared by the clean and noisy views so the
  // within-sample loss compares identically framed content.
  std::vector<int> offsets(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) {
    const FeatureMatrix &fm = batch[static_cast<size_t>(i)].clean;
    Require(fm.n_mels == mels, "TrainStep: feature band mismatch");
    Require(fm.frames >= crop, "TrainStep: utterance shorter than the crop");
    offsets[static_cast<size_t>(i)] =
        static_cast<int>(crop_rng_.UniformInt(
            static_cast<uint64_t>(fm.frames - crop + 1)));
  }

  Tensor<float> input;
  input.Resize(n, 1, mels, crop);
  std::vector<int> labels(static_cast<size_t>(n));
  for (int i = 0; i < b; ++i) {
    const PairSample &p = batch[static_cast<size_t>(i)];
    Require(p.speaker_index >= 0, "TrainStep: unlabeled utterance");
    labels[static_cast<size_t>(i)] = p.speaker_index;
    const int off = offsets[static_cast<size_t>(i)];
    for (int m = 0; m < mels; ++m)
      for (int t = 0; t < crop; ++t)
        input.At(i, 0, m, t) = static_cast<float>(p.clean.At(off + t, m));
    if (paired) {
      Require(p.noisy.frames == p.clean.frames && p.noisy.n_mels == mels,
              "TrainStep: clean/noisy shape mismatch");
      labels[static_cast<size_t>(b + i)] = p.speaker_index;
      for (int m = 0; m < mels; ++m)
        for (int t = 0; t < crop; ++t)
          input.At(b + i, 0, m, t) =
              static_cast<float>(p.noisy.At(off + t, m));
    }
  }

  StepMetrics out;

  // Update 1: identification loss over every view in the batch.
  net_.Store().ZeroGrad();
  Tensor<float> emb = net_.ForwardEmbed(input, Mode::kTrain);
  Tensor<float> grad_emb;
  if (cfg_.net.head == HeadType::kSoftmax) {
    Tensor<float> logits = net_.ClassifierForward(emb, Mode::kTrain,
                                                  &dropout_rng_);
    Tensor<float> grad_logits;
    out.id_loss = CrossEntropyBatch(logits, labels, &grad_logits);
    if (!std::isfinite(out.id_loss))
      AbortOnNan("identification loss", cur_epoch_, cur_step_);
    net_.ClassifierBackward(grad_logits, &grad_emb);
  } else {
    out.id_loss = ASoftmaxBatch(emb, labels, net_.ClassifierWeight(),
                                cfg_.net.a_softmax_margin, CurrentLambda(),
                                &grad_emb, /*train=*/true);
    if (!std::isfinite(out.id_loss))
      AbortOnNan("identification loss", cur_epoch_, cur_step_);
  }
  net_.BackwardFromEmbedding(grad_emb);
  ApplyOptimizer();

  // Update 2: within-sample loss over the pairs, through the parameters the
  // first update just produced.  A loss of exactly zero (alpha == 0, or all
  // pairs already coincident) leaves parameters and momentum untouched.
  if (cfg_.within != WithinLoss::kNone) {
    net_.Store().ZeroGrad();
    Tensor<float> emb2 = net_.ForwardEmbed(input, Mode::kTrain);
    const int p = cfg_.net.embedding_dim;
    Tensor<float> grad2;
    grad2.Resize(n, p, 1, 1);
    double sum = 0.0;
    std::vector<float> gc(static_cast<size_t>(p)), gn(static_cast<size_t>(p));
    for (int i = 0; i < b; ++i) {
      const float *fc = &emb2.v[static_cast<size_t>(i) * p];
      const float *fn = &emb2.v[static_cast<size_t>(b + i) * p];
      double li = cfg_.within == WithinLoss::kMse
                      ? MseWithin(fc, fn, p, gc.data(), gn.data())
                      : CosineWithin(fc, fn, p, gc.data(), gn.data());
      sum += li;
      const float scale = static_cast<float>(cfg_.alpha / b);
      for (int d = 0; d < p; ++d) {
        grad2.v[static_cast<size_t>(i) * p + d] = scale * gc[static_cast<size_t>(d)];
        grad2.v[static_cast<size_t>(b + i) * p + d] =
            scale * gn[static_cast<size_t>(d)];
      }
    }
    out.within_loss = sum / b;
    if (!std::isfinite(out.within_loss))
      AbortOnNan("within-sample loss", cur_epoch_, cur_step_);
    double weighted = cfg_.alpha * out.within_loss;
    if (weighted != 0.0) {
      net_.BackwardFromEmbedding(grad2);
      ApplyOptimizer();
      out.second_update_applied = true;
    }
  }

  ++steps_done_;
  return out;
}

std::vector<EpochLog> Trainer::Run() {
  std::optional<double> ref_mse;
  if (!cfg_.reference_checkpoint.empty()) {
    EmbedNet<float> ref = LoadCheckpoint(cfg_.reference_checkpoint);
    std::vector<PairSample> pairs = BuildPairedEvalSet(maker_, cfg_.seed);
    ref_mse = ReferenceMse(&ref, pairs);
  }
  std::vector<EpochLog> logs;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    int decays = 0;
    for (double f : cfg_.lr_milestones)
      if (epoch >= static_cast<int>(std::ceil(f * cfg_.epochs))) ++decays;
    double lr = cfg_.lr * std::pow(cfg_.lr_decay, decays);
    sgd_.SetLr(lr);
    auto t0 = std::chrono::steady_clock::now();
    double id_sum = 0.0, within_sum = 0.0;
    for (int step = 0; step < steps_per_epoch_; ++step) {
      cur_epoch_ = epoch;
      cur_step_ = step;
      std::vector<PairSample> batch = MakeBatch(epoch, step);
      StepMetrics m = TrainStep(batch);
      id_sum += m.id_loss;
      within_sum += m.within_loss;
      if (provenance_.is_open())
        for (const PairSample &ps : batch)
          provenance_ << ProvenanceJson(ps.provenance) << "\n";
    }
    auto t1 = std::chrono::steady_clock::now();
    EpochLog log;
    log.epoch = epoch;
    log.id_loss = id_sum / steps_per_epoch_;
    log.within_loss = within_sum / steps_per_epoch_;
    log.lr = lr;
    log.wall_s = std::chrono::duration<double>(t1 - t0).count();
    log.reference_mse = ref_mse;
    logs.push_back(log);
  }
  if (provenance_.is_open()) provenance_.flush();
  return logs;
}

std::vector<float> EmbedUtterance(EmbedNet<float> *net,
                                  const FeatureMatrix &fm) {
  Tensor<float> input = FeaturesToInput<float>({&fm});
  Tensor<float> emb = net->ForwardEmbed(input, Mode::kEval);
  return std::vector<float>(emb.v.begin(),
                            emb.v.begin() + net->Config().embedding_dim);
}

double ReferenceMse(EmbedNet<float> *net, const std::vector<PairSample> &pairs) {
  Require(!pairs.empty(), "ReferenceMse: no pairs");
  double sum = 0.0;
  for (const PairSample &p : pairs) {
    std::vector<float> ec = EmbedUtterance(net, p.clean);
    std::vector<float> en = EmbedUtterance(net, p.noisy);
    sum += MseWithin(ec, en);
  }
  return sum / static_cast<double>(pairs.size());
}

void WriteEpochLogCsv(const std::vector<EpochLog> &logs,
                      const std::string &path) {
  std::ofstream out(path);
  Require(out.good(), "WriteEpochLogCsv: cannot write " + path);
  out << "epoch,id_loss,within_loss,lr,wall_s,reference_mse\n";
  char buf[256];
  for (const EpochLog &l : logs) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.3f,", l.epoch,
                  l.id_loss, l.within_loss, l.lr, l.wall_s);
    out << buf;
    if (l.reference_mse) {
      std::snprintf(buf, sizeof(buf), "%.9g", *l.reference_mse);
      out << buf;
    }
    out << "\n";
  }
}

std::vector<EpochLog> RunTraining(const TrainConfig &cfg,
                                  const CorpusManifest &manifest,
                                  const std::string &run_dir) {
  Require(!run_dir.empty(), "RunTraining: run_dir required");
  std::filesystem::create_directories(run_dir);
  Trainer trainer(cfg, manifest, run_dir);
  std::vector<EpochLog> logs = trainer.Run();
  SaveCheckpoint(trainer.Net(), run_dir + "/checkpoint.bin");
  WriteEpochLogCsv(logs, run_dir + "/epoch_log.csv");
  return logs;
}

}  // namespace vivet
