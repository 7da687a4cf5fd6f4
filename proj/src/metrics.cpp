// metrics.cpp
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

#include "vivet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace vivet {

void ScoreSet::Validate() const {
  Require(!target.empty(), "ScoreSet: no target trials");
  Require(!nontarget.empty(), "ScoreSet: no nontarget trials");
  for (double s : target) Require(std::isfinite(s), "ScoreSet: non-finite score");
  for (double s : nontarget) Require(std::isfinite(s), "ScoreSet: non-finite score");
}

namespace {

// Operating points swept over thresholds t = each distinct score, then +inf
// (reject everything).  At threshold t: accept iff score >= t, so
// P_miss(t) = |{target < t}| / T and P_fa(t) = |{nontarget >= t}| / N.
struct Sweep {
  std::vector<double> thresholds;  // ascending; last is +inf
  std::vector<double> p_fa;
  std::vector<double> p_miss;
};

Sweep SweepThresholds(const ScoreSet &scores) {
  std::vector<double> tgt = scores.target;
  std::vector<double> non = scores.nontarget;
  std::sort(tgt.begin(), tgt.end());
  std::sort(non.begin(), non.end());

  std::vector<double> thr;
  thr.reserve(tgt.size() + non.size() + 1);
  thr.insert(thr.end(), tgt.begin(), tgt.end());
  thr.insert(thr.end(), non.begin(), non.end());
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
  thr.push_back(std::numeric_limits<double>::infinity());

  Sweep sw;
  sw.thresholds = thr;
  sw.p_fa.resize(thr.size());
  sw.p_miss.resize(thr.size());
  for (size_t i = 0; i < thr.size(); ++i) {
    double t = thr[i];
    auto missed = std::lower_bound(tgt.begin(), tgt.end(), t) - tgt.begin();
    auto accepted = non.end() - std::lower_bound(non.begin(), non.end(), t);
    sw.p_miss[i] = static_cast<double>(missed) / static_cast<double>(tgt.size());
    sw.p_fa[i] = static_cast<double>(accepted) / static_cast<double>(non.size());
  }
  return sw;
}

}  // namespace

std::vector<DetPoint> DetPoints(const ScoreSet &scores) {
  scores.Validate();
  Sweep sw = SweepThresholds(scores);
  std::vector<DetPoint> points(sw.thresholds.size());
  for (size_t i = 0; i < points.size(); ++i)
    points[i] = {sw.p_fa[i], sw.p_miss[i]};
  return points;
}

EerResult ComputeEer(const ScoreSet &scores) {
  scores.Validate();
  Sweep sw = SweepThresholds(scores);

  // d = P_miss - P_fa walks from -1 (accept all) to +1 (reject all); the EER
  // sits where d crosses 0, linearly interpolated inside the segment.
  for (size_t i = 0; i < sw.thresholds.size(); ++i) {
    double d = sw.p_miss[i] - sw.p_fa[i];
    if (d < 0.0) continue;
    if (d == 0.0 || i == 0)
      return {sw.p_miss[i], sw.thresholds[i]};
    double d_prev = sw.p_miss[i - 1] - sw.p_fa[i - 1];
    double s = -d_prev / (d - d_prev);
    double eer = sw.p_fa[i - 1] + s * (sw.p_fa[i] - sw.p_fa[i - 1]);
    double thr = std::isinf(sw.thresholds[i])
                     ? sw.thresholds[i - 1]
                     : sw.thresholds[i - 1] +
                           s * (sw.thresholds[i] - sw.thresholds[i - 1]);
    return {eer, thr};
  }
  throw Error("ComputeEer: no crossing found (malformed score set)");
}

double ComputeMinDcf(const ScoreSet &scores, double p_target) {
  scores.Validate();
  Require(p_target > 0.0 && p_target < 1.0,
          "ComputeMinDcf: p_target must be in (0, 1)");
  Sweep sw = SweepThresholds(scores);
  double norm = std::min(p_target, 1.0 - p_target);
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sw.thresholds.size(); ++i) {
    double cost = p_target * sw.p_miss[i] + (1.0 - p_target) * sw.p_fa[i];
    best = std::min(best, cost / norm);
  }
  return best;
}

double ComputeMinDcfAvg(const ScoreSet &scores) {
  return 0.5 * (ComputeMinDcf(scores, 0.01) + ComputeMinDcf(scores, 0.001));
}

ScoreSet SplitScores(const TrialSet &trials, const std::vector<double> &scores) {
  Require(trials.trials.size() == scores.size(),
          "SplitScores: trial/score count mismatch");
  ScoreSet out;
  for (size_t i = 0; i < scores.size(); ++i)
    (trials.trials[i].target ? out.target : out.nontarget).push_back(scores[i]);
  return out;
}

void WriteScores(const TrialSet &trials, const std::vector<double> &scores,
                 const std::string &path) {
  Require(trials.trials.size() == scores.size(),
          "WriteScores: trial/score count mismatch");
  std::ofstream out(path, std::ios::trunc);
  Require(out.good(), "WriteScores: cannot open " + path);
  for (size_t i = 0; i < scores.size(); ++i) {
    const Trial &t = trials.trials[i];
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", scores[i]);
    out << (t.target ? "target" : "nontarget") << ' ' << t.enroll_utt << ' '
        << t.test_utt << ' ' << buf << '\n';
  }
}

std::pair<TrialSet, std::vector<double>> ReadScores(const std::string &path) {
  std::ifstream in(path);
  Require(in.good(), "ReadScores: cannot open " + path);
  TrialSet trials;
  std::vector<double> scores;
  std::string label, enroll, test, score;
  while (in >> label >> enroll >> test >> score) {
    Require(label == "target" || label == "nontarget",
            "ReadScores: bad label '" + label + "'");
    Trial t;
    t.target = (label == "target");
    t.enroll_utt = enroll;
    t.test_utt = test;
    trials.trials.push_back(t);
    scores.push_back(std::stod(score));
  }
  Require(!scores.empty(), "ReadScores: no scores in " + path);
  return {trials, scores};
}

}  // namespace vivet
