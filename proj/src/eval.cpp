// eval.cpp
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

#include "vivet/eval.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vivet/train.hpp"

namespace vivet {

double CosineScore(const std::vector<float> &a, const std::vector<float> &b) {
  Require(a.size() == b.size() && !a.empty(),
          "CosineScore: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    dot += static_cast<double>(a[d]) * b[d];
    na += static_cast<double>(a[d]) * a[d];
    nb += static_cast<double>(b[d]) * b[d];
  }
  Require(na > 0.0 && nb > 0.0, "CosineScore: zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string EvalCondition::Name() const {
  if (original) return "original";
  return std::string(NoiseTypeName(type)) + "_" + ToString(snr_db) + "db";
}

EvalCondition ParseCondition(const std::string &text) {
  EvalCondition c;
  if (text == "original" || text.empty()) return c;
  size_t colon = text.find(':');
  Require(colon != std::string::npos,
          "condition must be \"original\" or \"type:snr\", got " + text);
  c.original = false;
  c.type = NoiseTypeFromName(text.substr(0, colon));
  c.snr_db = std::stoi(text.substr(colon + 1));
  return c;
}

std::vector<EvalCondition> StandardConditions(const std::vector<int> &snrs) {
  std::vector<EvalCondition> out;
  out.push_back(EvalCondition{});
  for (NoiseType t :
       {NoiseType::kBabble, NoiseType::kMusic, NoiseType::kAmbient})
    for (int s : snrs) {
      EvalCondition c;
      c.original = false;
      c.type = t;
      c.snr_db = s;
      out.push_back(c);
    }
  return out;
}

std::map<std::string, FeatureMatrix> BuildConditionFeatures(
    const PairMaker &maker, const EvalCondition &cond) {
  std::vector<const UttEntry *> test = maker.Manifest().Split("test");
  Require(!test.empty(), "BuildConditionFeatures: empty test split");
  std::vector<FeatureMatrix> feats(test.size());
  if (cond.original) {
    for (size_t i = 0; i < test.size(); ++i)
      feats[i] = maker.CleanFeatures(test[i]->utt_id);
  } else {
    // A one-hot policy turns the shared draw-and-mix path into this exact
    // condition: the wanted type with certainty, at one fixed SNR.
    AugmentPolicy policy = maker.Policy();
    policy.snr_low_db = cond.snr_db;
    policy.snr_high_db = cond.snr_db;
    for (double &w : policy.noise_type_weights) w = 0.0;
    policy.noise_type_weights[static_cast<size_t>(cond.type)] = 1.0;
    ParallelFor(0, test.size(), [&](size_t i) {
      const std::string &utt = test[i]->utt_id;
      RandomStream rng(MixSeed(
          {Fnv1a("evalcond"), Fnv1a(NoiseTypeName(cond.type)),
           static_cast<uint64_t>(cond.snr_db + 1000), Fnv1a(utt)}));
      AugmentDraw draw =
          DrawAugmentation(policy, maker.Manifest(), "test", &rng);
      size_t fit_offset = 0;
      Waveform noisy = maker.MixDraw(utt, draw, "test", &rng, &fit_offset);
      feats[i] = LogMel(noisy, maker.Fbank());
    });
  }
  std::map<std::string, FeatureMatrix> out;
  for (size_t i = 0; i < test.size(); ++i)
    out[test[i]->utt_id] = std::move(feats[i]);
  return out;
}

std::map<std::string, std::vector<float>> ExtractEmbeddings(
    EmbedNet<float> *net, const std::map<std::string, FeatureMatrix> &feats) {
  std::map<std::string, std::vector<float>> out;
  for (const auto &kv : feats) out[kv.first] = EmbedUtterance(net, kv.second);
  return out;
}

std::vector<double> ScoreTrials(
    const TrialSet &trials,
    const std::map<std::string, std::vector<float>> &emb) {
  std::vector<double> scores;
  scores.reserve(trials.trials.size());
  for (const Trial &t : trials.trials) {
    auto e = emb.find(t.enroll_utt);
    auto s = emb.find(t.test_utt);
    Require(e != emb.end() && s != emb.end(),
            "ScoreTrials: trial names an utterance with no embedding");
    scores.push_back(CosineScore(e->second, s->second));
  }
  return scores;
}

ScoreSet SplitByLabel(const TrialSet &trials,
                      const std::vector<double> &scores) {
  Require(trials.trials.size() == scores.size(),
          "SplitByLabel: trial/score count mismatch");
  ScoreSet out;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (trials.trials[i].target)
      out.target.push_back(scores[i]);
    else
      out.nontarget.push_back(scores[i]);
  }
  return out;
}

std::vector<ConditionResult> EvaluateConditions(
    const PairMaker &maker, EmbedNet<float> *net, const TrialSet &trials,
    const std::vector<int> &snrs, const std::string &out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<ConditionResult> rows;
  ScoreSet pooled;
  for (const EvalCondition &cond : StandardConditions(snrs)) {
    std::map<std::string, FeatureMatrix> feats =
        BuildConditionFeatures(maker, cond);
    std::map<std::string, std::vector<float>> emb =
        ExtractEmbeddings(net, feats);
    std::vector<double> scores = ScoreTrials(trials, emb);
    WriteScores(trials, scores, out_dir + "/scores_" + cond.Name() + ".txt");
    ConditionResult r;
    r.cond = cond;
    r.label = cond.Name();
    r.scores = SplitByLabel(trials, scores);
    r.eer = ComputeEer(r.scores).eer;
    r.min_dcf = ComputeMinDcfAvg(r.scores);
    if (!cond.original) {
      pooled.target.insert(pooled.target.end(), r.scores.target.begin(),
                           r.scores.target.end());
      pooled.nontarget.insert(pooled.nontarget.end(),
                              r.scores.nontarget.begin(),
                              r.scores.nontarget.end());
    }
    rows.push_back(std::move(r));
  }
  ConditionResult all;
  all.cond.original = false;
  all.label = "all";
  all.scores = pooled;
  all.eer = ComputeEer(pooled).eer;
  all.min_dcf = ComputeMinDcfAvg(pooled);
  WriteMetricsCsv(rows, all, out_dir + "/metrics.csv");
  WriteDetCsv(DetPoints(pooled), out_dir + "/det.csv");
  rows.push_back(std::move(all));
  return rows;
}

void WriteMetricsCsv(const std::vector<ConditionResult> &rows,
                     const ConditionResult &pooled, const std::string &path) {
  std::ofstream out(path);
  Require(out.good(), "WriteMetricsCsv: cannot write " + path);
  out << "condition,snr_db,eer,min_dcf\n";
  char buf[160];
  auto emit = [&](const std::string &name, const std::string &snr, double eer,
                  double dcf) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g\n", name.c_str(),
                  snr.c_str(), eer, dcf);
    out << buf;
  };
  for (const ConditionResult &r : rows)
    emit(r.cond.original ? "original" : NoiseTypeName(r.cond.type),
         r.cond.original ? "" : ToString(r.cond.snr_db), r.eer, r.min_dcf);
  emit("all", "", pooled.eer, pooled.min_dcf);
}

void WriteDetCsv(const std::vector<DetPoint> &points, const std::string &path) {
  std::ofstream out(path);
  Require(out.good(), "WriteDetCsv: cannot write " + path);
  out << "p_fa,p_miss\n";
  char buf[80];
  for (const DetPoint &p : points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", p.p_fa, p.p_miss);
    out << buf;
  }
}

void DumpEmbeddings(const std::map<std::string, std::vector<float>> &emb,
                    const CorpusManifest &manifest, const std::string &suffix,
                    const std::string &path) {
  std::ofstream out(path);
  Require(out.good(), "DumpEmbeddings: cannot write " + path);
  char buf[40];
  for (const auto &kv : emb) {
    out << kv.first << suffix << " " << manifest.Find(kv.first).speaker_id;
    for (float v : kv.second) {
      std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(v));
      out << buf;
    }
    out << "\n";
  }
}

std::map<std::string, std::vector<float>> ReadEmbeddings(
    const std::string &path, std::map<std::string, std::string> *speakers) {
  std::ifstream in(path);
  Require(in.good(), "ReadEmbeddings: cannot read " + path);
  std::map<std::string, std::vector<float>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string utt, spk;
    Require(static_cast<bool>(ls >> utt >> spk),
            "ReadEmbeddings: malformed line in " + path);
    std::vector<float> v;
    double x;
    while (ls >> x) v.push_back(static_cast<float>(x));
    Require(!v.empty(), "ReadEmbeddings: empty vector for " + utt);
    out[utt] = std::move(v);
    if (speakers) (*speakers)[utt] = spk;
  }
  Require(!out.empty(), "ReadEmbeddings: no embeddings in " + path);
  return out;
}

std::vector<MetricsRow> ReadMetricsCsv(const std::string &path) {
  std::ifstream in(path);
  Require(in.good(), "ReadMetricsCsv: cannot read " + path);
  std::vector<MetricsRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    Require(cells.size() == 4, "ReadMetricsCsv: malformed row in " + path);
    MetricsRow r;
    r.condition = cells[0];
    r.snr = cells[1];
    r.eer = std::stod(cells[2]);
    r.min_dcf = std::stod(cells[3]);
    rows.push_back(std::move(r));
  }
  Require(!rows.empty(), "ReadMetricsCsv: no rows in " + path);
  return rows;
}

double ReductionPercent(double baseline, double value) {
  Require(baseline > 0.0, "ReductionPercent: baseline must be positive");
  return 100.0 * (baseline - value) / baseline;
}

}  // namespace vivet
