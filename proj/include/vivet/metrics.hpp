// vivet/metrics.hpp
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

#ifndef VIVET_METRICS_HPP_
#define VIVET_METRICS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "vivet/corpus.hpp"

namespace vivet {

// Trial scores split by ground truth.  Decisions accept when score >= t.
struct ScoreSet {
  std::vector<double> target;
  std::vector<double> nontarget;

  void Validate() const;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

struct DetPoint {
  double p_fa = 0.0;
  double p_miss = 0.0;
};

// ROC staircase vertices as (P_fa, P_miss), ordered by increasing threshold
// (P_fa nonincreasing, P_miss nondecreasing).  One vertex per distinct score
// plus the reject-all endpoint.
std::vector<DetPoint> DetPoints(const ScoreSet &scores);

// Error rate where P_miss and P_fa cross, with linear interpolation between
// adjacent staircase vertices when the crossing falls between them.
EerResult ComputeEer(const ScoreSet &scores);

// min over thresholds of [p_target * P_miss + (1 - p_target) * P_fa],
// normalized by min(p_target, 1 - p_target), with unit miss/false-alarm
// costs.  The reject-all and accept-all endpoints are included, so the
// result never exceeds 1.
double ComputeMinDcf(const ScoreSet &scores, double p_target);

// Mean of ComputeMinDcf at target priors 0.01 and 0.001.
double ComputeMinDcfAvg(const ScoreSet &scores);

// Splits aligned (trials, scores) by label.
ScoreSet SplitScores(const TrialSet &trials, const std::vector<double> &scores);

// Score file lines: "label enroll test score".
void WriteScores(const TrialSet &trials, const std::vector<double> &scores,
                 const std::string &path);
std::pair<TrialSet, std::vector<double>> ReadScores(const std::string &path);

}  // namespace vivet

#endif  // VIVET_METRICS_HPP_
