// commands.cpp
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

#include "vivet/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vivet/eval.hpp"

namespace vivet {

namespace {

Config LoadConfig(const std::string &path) {
  if (path.empty()) return Config::FromString("");
  return Config::FromFile(path);
}

void EchoConfig(const Config &cfg, const std::string &dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/config.ini");
  Require(out.good(), "cannot write config echo under " + dir);
  out << cfg.Text();
}

}  // namespace

std::string ResolveRunPath(const std::string &path) {
  Require(!path.empty(), "empty output path");
  if (std::filesystem::path(path).is_absolute()) return path;
  const char *root = std::getenv(kRunRootEnv);
  if (root && root[0] != '\0')
    return (std::filesystem::path(root) / path).string();
  return path;
}

CorpusConfig CorpusConfigFrom(const Config &cfg) {
  CorpusConfig c;
  c.n_speakers = cfg.GetInt("corpus.n_speakers", c.n_speakers);
  c.utts_per_speaker = cfg.GetInt("corpus.utts_per_speaker", c.utts_per_speaker);
  c.utt_duration_s = cfg.GetDouble("corpus.utt_duration_s", c.utt_duration_s);
  c.test_fraction = cfg.GetDouble("corpus.test_fraction", c.test_fraction);
  c.n_babble_speakers =
      cfg.GetInt("corpus.n_babble_speakers", c.n_babble_speakers);
  c.noise_clips_per_type_per_split =
      cfg.GetInt("corpus.noise_clips_per_type_per_split",
                 c.noise_clips_per_type_per_split);
  c.noise_clip_duration_s =
      cfg.GetDouble("corpus.noise_clip_duration_s", c.noise_clip_duration_s);
  c.sample_rate = cfg.GetInt("corpus.sample_rate", c.sample_rate);
  c.seed = cfg.GetU64("corpus.seed", c.seed);
  return c;
}

FbankConfig FbankConfigFrom(const Config &cfg) {
  FbankConfig f;
  f.sample_rate = cfg.GetInt("features.sample_rate", f.sample_rate);
  f.win_length = cfg.GetInt("features.win_length", f.win_length);
  f.hop_length = cfg.GetInt("features.hop_length", f.hop_length);
  f.n_fft = cfg.GetInt("features.n_fft", f.n_fft);
  f.n_mels = cfg.GetInt("features.n_mels", f.n_mels);
  f.fmin = cfg.GetDouble("features.fmin", f.fmin);
  f.fmax = cfg.GetDouble("features.fmax", f.fmax);
  f.log_floor = cfg.GetDouble("features.log_floor", f.log_floor);
  f.mean_normalize = cfg.GetBool("features.mean_normalize", f.mean_normalize);
  return f;
}

AugmentPolicy PolicyFrom(const Config &cfg) {
  AugmentPolicy p;
  p.snr_low_db = cfg.GetDouble("augment.snr_low_db", p.snr_low_db);
  p.snr_high_db = cfg.GetDouble("augment.snr_high_db", p.snr_high_db);
  p.noise_type_weights[0] =
      cfg.GetDouble("augment.weight_music", p.noise_type_weights[0]);
  p.noise_type_weights[1] =
      cfg.GetDouble("augment.weight_ambient", p.noise_type_weights[1]);
  p.noise_type_weights[2] =
      cfg.GetDouble("augment.weight_television", p.noise_type_weights[2]);
  p.noise_type_weights[3] =
      cfg.GetDouble("augment.weight_babble", p.noise_type_weights[3]);
  p.babble_k_min = cfg.GetInt("augment.babble_k_min", p.babble_k_min);
  p.babble_k_max = cfg.GetInt("augment.babble_k_max", p.babble_k_max);
  return p;
}

NetConfig NetConfigFrom(const Config &cfg) {
  NetConfig n;
  std::vector<int> ch(n.stage_channels.begin(), n.stage_channels.end());
  std::vector<int> bl(n.stage_blocks.begin(), n.stage_blocks.end());
  ch = cfg.GetIntList("net.channels", ch);
  bl = cfg.GetIntList("net.blocks", bl);
  Require(ch.size() == 4 && bl.size() == 4,
          "net.channels and net.blocks must have four entries");
  std::copy(ch.begin(), ch.end(), n.stage_channels.begin());
  std::copy(bl.begin(), bl.end(), n.stage_blocks.begin());
  n.n_mels = cfg.GetInt("features.n_mels", n.n_mels);
  n.embedding_dim = cfg.GetInt("net.embedding_dim", n.embedding_dim);
  n.n_classes = cfg.GetInt("net.n_classes", n.n_classes);
  n.dropout_p = cfg.GetDouble("net.dropout_p", n.dropout_p);
  n.head = HeadTypeFromName(
      cfg.GetString("net.head", HeadTypeName(n.head)));
  n.a_softmax_margin = cfg.GetInt("net.a_softmax_margin", n.a_softmax_margin);
  return n;
}

TrainConfig TrainConfigFrom(const Config &cfg) {
  TrainConfig t;
  t.net = NetConfigFrom(cfg);
  t.fbank = FbankConfigFrom(cfg);
  t.policy = PolicyFrom(cfg);
  t.mode = AugModeFromName(cfg.GetString("train.mode", AugModeName(t.mode)));
  t.within = WithinLossFromName(
      cfg.GetString("train.within", WithinLossName(t.within)));
  t.alpha = cfg.GetDouble("train.alpha", t.alpha);
  t.epochs = cfg.GetInt("train.epochs", t.epochs);
  t.batch_size = cfg.GetInt("train.batch_size", t.batch_size);
  t.crop_frames = cfg.GetInt("train.crop_frames", t.crop_frames);
  t.lr = cfg.GetDouble("train.lr", t.lr);
  t.momentum = cfg.GetDouble("train.momentum", t.momentum);
  t.weight_decay = cfg.GetDouble("train.weight_decay", t.weight_decay);
  t.lr_milestones = cfg.GetDoubleList("train.lr_milestones", t.lr_milestones);
  t.lr_decay = cfg.GetDouble("train.lr_decay", t.lr_decay);
  t.offline_copies = cfg.GetInt("train.offline_copies", t.offline_copies);
  t.lambda_start = cfg.GetDouble("train.lambda_start", t.lambda_start);
  t.lambda_end = cfg.GetDouble("train.lambda_end", t.lambda_end);
  t.reference_checkpoint =
      cfg.GetString("train.reference_checkpoint", t.reference_checkpoint);
  t.seed = cfg.GetU64("train.seed", t.seed);
  return t;
}

int CmdSynthCorpus(const SynthCorpusOptions &opt) {
  Config cfg = LoadConfig(opt.config_path);
  CorpusConfig cc = CorpusConfigFrom(cfg);
  if (opt.seed) cc.seed = *opt.seed;
  cc.Validate();
  std::string out_dir = ResolveRunPath(opt.out_dir);
  CorpusManifest manifest = BuildCorpus(cc, out_dir);
  TrialSet trials =
      BuildTrials(manifest, cfg.GetInt("corpus.n_target_trials", 72),
                  cfg.GetInt("corpus.n_nontarget_trials", 720), cc.seed);
  WriteTrials(trials, out_dir + "/trials.txt");
  EchoConfig(cfg, out_dir);
  std::cout << "corpus: " << manifest.utterances.size() << " utterances, "
            << manifest.noises.size() << " noise clips, "
            << trials.trials.size() << " trials -> " << out_dir << "\n";
  return 0;
}

int CmdTrain(const TrainOptions &opt) {
  Config cfg = LoadConfig(opt.config_path);
  TrainConfig tc = TrainConfigFrom(cfg);
  if (opt.seed) tc.seed = *opt.seed;
  CorpusManifest manifest = ReadManifest(ResolveRunPath(opt.corpus_dir));
  if (!cfg.Has("net.n_classes"))
    tc.net.n_classes = static_cast<int>(TrainSpeakers(manifest).size());
  tc.Validate();
  std::string run_dir = ResolveRunPath(opt.out_dir);
  EchoConfig(cfg, run_dir);
  std::vector<EpochLog> logs = RunTraining(tc, manifest, run_dir);
  const EpochLog &last = logs.back();
  std::printf("trained %d epochs: id_loss %.4f within_loss %.4f -> %s\n",
              static_cast<int>(logs.size()), last.id_loss, last.within_loss,
              run_dir.c_str());
  return 0;
}

int CmdExtract(const ExtractOptions &opt) {
  Config cfg = LoadConfig(opt.config_path);
  EmbedNet<float> net = LoadCheckpoint(ResolveRunPath(opt.checkpoint));
  CorpusManifest manifest = ReadManifest(ResolveRunPath(opt.corpus_dir));
  PairMaker maker(manifest, FbankConfigFrom(cfg), PolicyFrom(cfg),
                  cfg.GetU64("train.seed", 7));
  EvalCondition cond = ParseCondition(opt.condition);
  std::map<std::string, FeatureMatrix> feats =
      BuildConditionFeatures(maker, cond);
  std::map<std::string, std::vector<float>> emb =
      ExtractEmbeddings(&net, feats);
  std::string suffix = cond.original ? "" : "#" + cond.Name();
  std::string out = ResolveRunPath(opt.out_path);
  DumpEmbeddings(emb, manifest, suffix, out);
  std::cout << "extracted " << emb.size() << " embeddings (" << cond.Name()
            << ") -> " << out << "\n";
  return 0;
}

int CmdScore(const ScoreOptions &opt) {
  std::map<std::string, std::vector<float>> emb =
      ReadEmbeddings(ResolveRunPath(opt.embeddings_path), nullptr);
  TrialSet trials = ReadTrials(ResolveRunPath(opt.trials_path));
  std::vector<double> scores = ScoreTrials(trials, emb);
  std::string out = ResolveRunPath(opt.out_path);
  WriteScores(trials, scores, out);
  std::cout << "scored " << scores.size() << " trials -> " << out << "\n";
  return 0;
}

int CmdEval(const EvalOptions &opt) {
  Config cfg = LoadConfig(opt.config_path);
  EmbedNet<float> net = LoadCheckpoint(ResolveRunPath(opt.checkpoint));
  CorpusManifest manifest = ReadManifest(ResolveRunPath(opt.corpus_dir));
  PairMaker maker(manifest, FbankConfigFrom(cfg), PolicyFrom(cfg),
                  cfg.GetU64("train.seed", 7));
  TrialSet trials =
      ReadTrials(ResolveRunPath(opt.corpus_dir) + "/trials.txt");
  std::string out_dir = ResolveRunPath(opt.out_dir);
  std::vector<ConditionResult> rows =
      EvaluateConditions(maker, &net, trials, opt.snrs, out_dir);
  for (const ConditionResult &r : rows)
    std::printf("%-14s eer %6.2f%%  min_dcf %.4f\n", r.label.c_str(),
                100.0 * r.eer, r.min_dcf);
  return 0;
}

int CmdDet(const DetOptions &opt) {
  auto [trials, scores] = ReadScores(ResolveRunPath(opt.scores_path));
  ScoreSet set = SplitByLabel(trials, scores);
  std::string out = ResolveRunPath(opt.out_path);
  WriteDetCsv(DetPoints(set), out);
  std::cout << "det curve (" << set.target.size() << " target, "
            << set.nontarget.size() << " nontarget) -> " << out << "\n";
  return 0;
}

int CmdReport(const ReportOptions &opt) {
  Require(!opt.run_dirs.empty(), "report: at least one run directory");
  struct Run {
    std::string name;
    std::vector<MetricsRow> rows;
  };
  std::vector<Run> runs;
  for (const std::string &dir : opt.run_dirs) {
    std::string resolved = ResolveRunPath(dir);
    std::string path = resolved + "/metrics.csv";
    if (!std::filesystem::exists(path)) path = resolved + "/eval/metrics.csv";
    Run r;
    r.name = std::filesystem::path(resolved).filename().string();
    if (r.name.empty()) r.name = resolved;
    r.rows = ReadMetricsCsv(path);
    runs.push_back(std::move(r));
  }
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %-5s", "condition", "snr");
  out << buf;
  for (const Run &r : runs) {
    std::snprintf(buf, sizeof(buf), " | %-20s", r.name.c_str());
    out << buf;
  }
  out << "\n";
  for (size_t i = 0; i < runs[0].rows.size(); ++i) {
    const MetricsRow &base = runs[0].rows[i];
    std::snprintf(buf, sizeof(buf), "%-12s %-5s", base.condition.c_str(),
                  base.snr.empty() ? "-" : base.snr.c_str());
    out << buf;
    for (const Run &r : runs) {
      Require(i < r.rows.size() && r.rows[i].condition == base.condition &&
                  r.rows[i].snr == base.snr,
              "report: metric files do not share a condition grid");
      std::snprintf(buf, sizeof(buf), " | eer %6.2f%% dcf %.4f",
                    100.0 * r.rows[i].eer, r.rows[i].min_dcf);
      out << buf;
    }
    out << "\n";
  }
  // Relative deltas on the pooled noisy row, against the first run.
  auto pooled = [](const Run &r) -> const MetricsRow & {
    for (const MetricsRow &row : r.rows)
      if (row.condition == "all") return row;
    throw Error("report: no pooled row in " + r.name);
  };
  const MetricsRow &base = pooled(runs[0]);
  for (size_t k = 1; k < runs.size(); ++k) {
    const MetricsRow &row = pooled(runs[k]);
    std::snprintf(buf, sizeof(buf),
                  "%s vs %s (all): EER reduction %.1f%%, DCF reduction %.1f%%\n",
                  runs[k].name.c_str(), runs[0].name.c_str(),
                  ReductionPercent(base.eer, row.eer),
                  ReductionPercent(base.min_dcf, row.min_dcf));
    out << buf;
  }
  std::cout << out.str();
  if (!opt.out_path.empty()) {
    std::string path = ResolveRunPath(opt.out_path);
    std::ofstream f(path);
    Require(f.good(), "report: cannot write " + path);
    f << out.str();
  }
  return 0;
}

int CmdPairedMse(const PairedMseOptions &opt) {
  Config cfg = LoadConfig(opt.config_path);
  EmbedNet<float> net = LoadCheckpoint(ResolveRunPath(opt.checkpoint));
  CorpusManifest manifest = ReadManifest(ResolveRunPath(opt.corpus_dir));
  PairMaker maker(manifest, FbankConfigFrom(cfg), PolicyFrom(cfg), opt.seed);
  std::vector<PairSample> pairs = BuildPairedEvalSet(maker, opt.seed);
  double mse = ReferenceMse(&net, pairs);
  std::printf("paired clean/noisy embedding mse over %d pairs: %.9g\n",
              static_cast<int>(pairs.size()), mse);
  return 0;
}

}  // namespace vivet
