// tests/test_metrics.cpp
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "vivet/common.hpp"
#include "vivet/corpus.hpp"
#include "vivet/metrics.hpp"

using namespace vivet;

namespace {

// Error rates at one threshold by direct counting: accept when score >= t.
void CountErrors(const ScoreSet &s, double t, double *p_miss, double *p_fa) {
  size_t missed = 0, accepted = 0;
  for (double x : s.target)
    if (x < t) ++missed;
  for (double x : s.nontarget)
    if (x >= t) ++accepted;
  *p_miss = static_cast<double>(missed) / static_cast<double>(s.target.size());
  *p_fa =
      static_cast<double>(accepted) / static_cast<double>(s.nontarget.size());
}

std::vector<double> CandidateThresholds(const ScoreSet &s) {
  std::vector<double> thr = s.target;
  thr.insert(thr.end(), s.nontarget.begin(), s.nontarget.end());
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
  thr.push_back(std::numeric_limits<double>::infinity());
  return thr;
}

// Exhaustive threshold enumeration, one count pass per threshold.
double OracleMinDcf(const ScoreSet &s, double p_target) {
  double norm = std::min(p_target, 1.0 - p_target);
  double best = std::numeric_limits<double>::infinity();
  for (double t : CandidateThresholds(s)) {
    double p_miss, p_fa;
    CountErrors(s, t, &p_miss, &p_fa);
    best = std::min(best, (p_target * p_miss + (1.0 - p_target) * p_fa) / norm);
  }
  return best;
}

// Walks the enumerated operating points and interpolates the P_miss = P_fa
// crossing linearly, independently of the production sweep.
double OracleEer(const ScoreSet &s) {
  std::vector<double> thr = CandidateThresholds(s);
  double prev_fa = 0.0, prev_d = 0.0;
  for (size_t i = 0; i < thr.size(); ++i) {
    double p_miss, p_fa;
    CountErrors(s, thr[i], &p_miss, &p_fa);
    double d = p_miss - p_fa;
    if (d >= 0.0) {
      if (d == 0.0 || i == 0) return p_miss;
      double step = -prev_d / (d - prev_d);
      return prev_fa + step * (p_fa - prev_fa);
    }
    prev_fa = p_fa;
    prev_d = d;
  }
  REQUIRE(false);
  return -1.0;
}

ScoreSet RandomInstance(RandomStream *rng) {
  ScoreSet s;
  size_t n_t = 1 + rng->UniformInt(5);
  size_t n_n = 1 + rng->UniformInt(5);
  // Half the instances use a coarse grid so ties and repeats occur.
  bool coarse = rng->UniformInt(2) == 0;
  auto draw = [&]() {
    if (coarse) return -0.4 + 0.2 * static_cast<double>(rng->UniformInt(5));
    return rng->Uniform(-1.0, 1.0);
  };
  for (size_t i = 0; i < n_t; ++i) s.target.push_back(draw());
  for (size_t i = 0; i < n_n; ++i) s.nontarget.push_back(draw());
  return s;
}

}  // namespace

TEST_CASE("perfectly separated scores give zero error") {
  ScoreSet s;
  s.target = {0.9, 0.8};
  s.nontarget = {0.1, 0.2};
  CHECK(ComputeEer(s).eer == 0.0);
  CHECK(ComputeMinDcf(s, 0.01) == 0.0);
  CHECK(ComputeMinDcf(s, 0.001) == 0.0);
  CHECK(ComputeMinDcfAvg(s) == 0.0);
  std::vector<DetPoint> det = DetPoints(s);
  bool has_origin = false;
  for (const DetPoint &p : det)
    if (p.p_fa == 0.0 && p.p_miss == 0.0) has_origin = true;
  CHECK(has_origin);
}

TEST_CASE("interleaved four-point set crosses at one half") {
  ScoreSet s;
  s.target = {0.6, 0.4};
  s.nontarget = {0.5, 0.3};
  CHECK(ComputeEer(s).eer == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("all-equal scores give mindcf one and eer one half") {
  ScoreSet s;
  s.target = {0.25, 0.25, 0.25};
  s.nontarget = {0.25, 0.25};
  CHECK(ComputeMinDcf(s, 0.01) == 1.0);
  CHECK(ComputeMinDcf(s, 0.001) == 1.0);
  CHECK(ComputeEer(s).eer == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("identically distributed classes sit near chance") {
  RandomStream rng(404);
  ScoreSet s;
  for (int i = 0; i < 10000; ++i) {
    s.target.push_back(rng.Normal());
    s.nontarget.push_back(rng.Normal());
  }
  double eer = ComputeEer(s).eer;
  CHECK(eer > 0.48);
  CHECK(eer < 0.52);
}

TEST_CASE("metrics match exhaustive enumeration on small instances") {
  RandomStream rng(777);
  for (int trial = 0; trial < 400; ++trial) {
    ScoreSet s = RandomInstance(&rng);
    CHECK(ComputeEer(s).eer == OracleEer(s));
    for (double p : {0.01, 0.001, 0.3}) {
      CHECK(ComputeMinDcf(s, p) == OracleMinDcf(s, p));
    }
  }
}

TEST_CASE("metrics are invariant under strictly increasing transforms") {
  RandomStream rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreSet s = RandomInstance(&rng);
    double eer = ComputeEer(s).eer;
    double dcf1 = ComputeMinDcf(s, 0.01);
    double dcf2 = ComputeMinDcf(s, 0.001);

    ScoreSet affine = s, cubic = s;
    for (double &v : affine.target) v = 2.0 * v + 3.0;
    for (double &v : affine.nontarget) v = 2.0 * v + 3.0;
    for (double &v : cubic.target) v = v * v * v;
    for (double &v : cubic.nontarget) v = v * v * v;

    CHECK(ComputeEer(affine).eer == eer);
    CHECK(ComputeMinDcf(affine, 0.01) == dcf1);
    CHECK(ComputeMinDcf(affine, 0.001) == dcf2);
    CHECK(ComputeEer(cubic).eer == eer);
    CHECK(ComputeMinDcf(cubic, 0.01) == dcf1);
    CHECK(ComputeMinDcf(cubic, 0.001) == dcf2);
  }
}

TEST_CASE("mindcf never exceeds the cost at the eer threshold") {
  RandomStream rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreSet s = RandomInstance(&rng);
    EerResult eer = ComputeEer(s);
    for (double p : {0.01, 0.3}) {
      double p_miss, p_fa;
      CountErrors(s, eer.threshold, &p_miss, &p_fa);
      double at_eer =
          (p * p_miss + (1.0 - p) * p_fa) / std::min(p, 1.0 - p);
      CHECK(ComputeMinDcf(s, p) <= at_eer + 1e-12);
    }
  }
}

TEST_CASE("eer stays within its range on random instances") {
  RandomStream rng(909);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreSet s = RandomInstance(&rng);
    double eer = ComputeEer(s).eer;
    CHECK(eer >= 0.0);
    CHECK(eer <= 1.0);
  }
}

TEST_CASE("det staircases are monotone and bounded in size") {
  RandomStream rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreSet s = RandomInstance(&rng);
    std::vector<DetPoint> det = DetPoints(s);
    CHECK(det.size() <= s.target.size() + s.nontarget.size() + 1);
    for (size_t i = 1; i < det.size(); ++i) {
      CHECK(det[i].p_fa <= det[i - 1].p_fa);
      CHECK(det[i].p_miss >= det[i - 1].p_miss);
    }
  }
}

TEST_CASE("eer recomputed from det points matches compute_eer") {
  RandomStream rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreSet s = RandomInstance(&rng);
    std::vector<DetPoint> det = DetPoints(s);
    double recomputed = -1.0;
    for (size_t i = 0; i < det.size(); ++i) {
      double d = det[i].p_miss - det[i].p_fa;
      if (d < 0.0) continue;
      if (d == 0.0 || i == 0) {
        recomputed = det[i].p_miss;
      } else {
        double d_prev = det[i - 1].p_miss - det[i - 1].p_fa;
        double step = -d_prev / (d - d_prev);
        recomputed = det[i - 1].p_fa + step * (det[i].p_fa - det[i - 1].p_fa);
      }
      break;
    }
    CHECK(std::abs(recomputed - ComputeEer(s).eer) <= 1e-12);
  }
}

TEST_CASE("score sets with a missing class are rejected") {
  ScoreSet no_target;
  no_target.nontarget = {0.1};
  CHECK_THROWS_AS(ComputeEer(no_target), Error);
  CHECK_THROWS_AS(ComputeMinDcf(no_target, 0.01), Error);
  CHECK_THROWS_AS(DetPoints(no_target), Error);
  ScoreSet no_nontarget;
  no_nontarget.target = {0.9};
  CHECK_THROWS_AS(ComputeEer(no_nontarget), Error);
  ScoreSet ok;
  ok.target = {0.9};
  ok.nontarget = {0.1};
  CHECK_THROWS_AS(ComputeMinDcf(ok, 0.0), Error);
  CHECK_THROWS_AS(ComputeMinDcf(ok, 1.0), Error);
}

TEST_CASE("split scores routes values by trial label") {
  TrialSet trials;
  trials.trials = {{true, "a", "b"}, {false, "a", "c"}, {true, "d", "e"}};
  std::vector<double> scores = {0.9, 0.2, 0.8};
  ScoreSet s = SplitScores(trials, scores);
  CHECK(s.target == std::vector<double>{0.9, 0.8});
  CHECK(s.nontarget == std::vector<double>{0.2});
  CHECK_THROWS_AS(SplitScores(trials, {0.9, 0.2}), Error);
}

TEST_CASE("score files round-trip labels and values") {
  TrialSet trials;
  trials.trials = {{true, "spk0_u1", "spk0_u2"},
                   {false, "spk0_u1", "spk1_u2"},
                   {true, "spk2_u3", "spk2_u4"}};
  std::vector<double> scores = {0.987654321, -0.123456789, 0.5};
  std::string path =
      (std::filesystem::temp_directory_path() / "vivet_scores.txt").string();
  WriteScores(trials, scores, path);
  auto [rt, rs] = ReadScores(path);
  REQUIRE(rt.trials.size() == 3);
  REQUIRE(rs.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(rt.trials[i].target == trials.trials[i].target);
    CHECK(rt.trials[i].enroll_utt == trials.trials[i].enroll_utt);
    CHECK(rt.trials[i].test_utt == trials.trials[i].test_utt);
    CHECK(rs[i] == doctest::Approx(scores[i]).epsilon(1e-9));
  }
  std::filesystem::remove(path);
}
