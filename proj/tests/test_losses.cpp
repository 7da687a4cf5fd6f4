// tests/test_losses.cpp
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

#include <cmath>
#include <functional>
#include <vector>

#include "vivet/common.hpp"
#include "vivet/losses.hpp"
#include "vivet/tensor.hpp"

using namespace vivet;

namespace {

// Central finite difference of a scalar function of one coordinate.
double CentralDiff(const std::function<double(double)> &f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double RelErr(double got, double want) {
  double denom = std::max({std::abs(got), std::abs(want), 1e-10});
  return std::abs(got - want) / denom;
}

Tensor<double> *const kNoGrad = nullptr;

Tensor<double> RandomTensor(int n, int c, RandomStream *rng, double scale) {
  Tensor<double> t(n, c, 1, 1);
  for (auto &x : t.v) x = scale * rng->Normal();
  return t;
}

// Unit-norm class rows.
Param<double> RandomClassifier(int classes, int p, RandomStream *rng) {
  Param<double> W;
  W.name = "W";
  W.t.Resize(classes, p, 1, 1);
  for (int j = 0; j < classes; ++j) {
    double norm = 0.0;
    for (int d = 0; d < p; ++d) {
      double x = rng->Normal();
      W.t.v[static_cast<size_t>(j) * p + d] = x;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (int d = 0; d < p; ++d) W.t.v[static_cast<size_t>(j) * p + d] /= norm;
  }
  return W;
}

}  // namespace

TEST_CASE("cos_m matches the multiple-angle identity") {
  for (int m = 1; m <= 4; ++m) {
    for (int i = 1; i < 40; ++i) {
      double theta = M_PI * i / 40.0;
      double c = std::cos(theta);
      // Both sides can sit near zero, so compare on the function scale.
      CHECK(std::abs(CosM(c, m) - std::cos(m * theta)) < 1e-12);
      // d cos(m*theta)/dc = m*sin(m*theta)/sin(theta).
      double want = m * std::sin(m * theta) / std::sin(theta);
      CHECK(std::abs(CosMPrime(c, m) - want) <
            1e-9 * std::max(1.0, std::abs(want)));
    }
  }
  CHECK_THROWS_AS(CosM(0.5, 5), Error);
  CHECK_THROWS_AS(CosMPrime(0.5, 0), Error);
}

TEST_CASE("cross entropy reproduces hand-computed values") {
  Tensor<double> logits(1, 2, 1, 1);
  logits.v = {0.0, 0.0};
  Tensor<double> grad;
  CHECK(CrossEntropyBatch(logits, {0}, &grad) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(grad.v[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(grad.v[1] == doctest::Approx(0.5).epsilon(1e-12));

  // Uniform logits over k classes cost log(k).
  Tensor<double> four(1, 4, 1, 1);
  four.v = {3.0, 3.0, 3.0, 3.0};
  CHECK(CrossEntropyBatch(four, {2}, kNoGrad) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // Max subtraction keeps huge logits finite.
  Tensor<double> big(1, 2, 1, 1);
  big.v = {1000.0, 1000.0};
  CHECK(CrossEntropyBatch(big, {1}, kNoGrad) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(CrossEntropyBatch(four, {4}, kNoGrad), Error);
  CHECK_THROWS_AS(CrossEntropyBatch(four, {0, 1}, kNoGrad), Error);
}

TEST_CASE("cross entropy gradient matches finite differences") {
  RandomStream rng(11);
  Tensor<double> logits = RandomTensor(3, 5, &rng, 2.0);
  std::vector<int> labels = {4, 0, 2};
  Tensor<double> grad;
  CrossEntropyBatch(logits, labels, &grad);
  for (size_t i = 0; i < logits.v.size(); ++i) {
    double fd = CentralDiff(
        [&](double x) {
          Tensor<double> probe = logits;
          probe.v[i] = x;
          return CrossEntropyBatch(probe, labels, kNoGrad);
        },
        logits.v[i], 1e-5);
    CHECK(RelErr(grad.v[i], fd) < 1e-7);
  }
}

TEST_CASE("margin one angular softmax reduces to plain softmax") {
  RandomStream rng(21);
  int n = 4, p = 6, classes = 5;
  Param<double> W = RandomClassifier(classes, p, &rng);
  Tensor<double> emb = RandomTensor(n, p, &rng, 1.5);
  std::vector<int> labels = {0, 3, 2, 4};

  // Plain path: logits = emb . W^T fed to cross entropy.
  Tensor<double> logits(n, classes, 1, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < classes; ++j) {
      double dot = 0.0;
      for (int d = 0; d < p; ++d) {
        dot += emb.v[static_cast<size_t>(i) * p + d] *
               W.t.v[static_cast<size_t>(j) * p + d];
      }
      logits.v[static_cast<size_t>(i) * classes + j] = dot;
    }
  }
  Tensor<double> grad_logits;
  double ce = CrossEntropyBatch(logits, labels, &grad_logits);

  for (double lambda : {0.0, 7.0, 1000.0}) {
    Tensor<double> grad_emb;
    double as = ASoftmaxBatch(emb, labels, W, 1, lambda, &grad_emb, false);
    CHECK(RelErr(as, ce) < 1e-12);
    // Chain rule through the fixed W reproduces the embedding gradient.
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < p; ++d) {
        double want = 0.0;
        for (int j = 0; j < classes; ++j) {
          want += grad_logits.v[static_cast<size_t>(i) * classes + j] *
                  W.t.v[static_cast<size_t>(j) * p + d];
        }
        CHECK(RelErr(grad_emb.v[static_cast<size_t>(i) * p + d], want) < 1e-9);
      }
    }
  }
}

TEST_CASE("angular softmax embedding gradient matches finite differences") {
  RandomStream rng(31);
  int n = 3, p = 5, classes = 4;
  Param<double> W = RandomClassifier(classes, p, &rng);
  std::vector<int> labels = {1, 3, 0};
  for (int margin : {2, 3, 4}) {
    for (double lambda : {0.0, 5.0, 1000.0}) {
      Tensor<double> emb = RandomTensor(n, p, &rng, 1.0);
      Tensor<double> grad_emb;
      ASoftmaxBatch(emb, labels, W, margin, lambda, &grad_emb, false);
      for (size_t i = 0; i < emb.v.size(); ++i) {
        double fd = CentralDiff(
            [&](double x) {
              Tensor<double> probe = emb;
              probe.v[i] = x;
              return ASoftmaxBatch(probe, labels, W, margin, lambda, kNoGrad,
                                   false);
            },
            emb.v[i], 1e-6);
        CHECK(RelErr(grad_emb.v[i], fd) < 1e-4);
      }
    }
  }
}

TEST_CASE("angular softmax classifier gradient matches finite differences") {
  RandomStream rng(41);
  int n = 3, p = 4, classes = 3;
  Param<double> W = RandomClassifier(classes, p, &rng);
  Tensor<double> emb = RandomTensor(n, p, &rng, 1.2);
  std::vector<int> labels = {2, 0, 1};
  for (int margin : {2, 4}) {
    double lambda = 5.0;
    W.t.g.clear();
    ASoftmaxBatch(emb, labels, W, margin, lambda, kNoGrad, true);
    REQUIRE(W.t.g.size() == W.t.v.size());
    for (size_t i = 0; i < W.t.v.size(); ++i) {
      double fd = CentralDiff(
          [&](double x) {
            Param<double> probe = W;
            probe.t.g.clear();
            probe.t.v[i] = x;
            return ASoftmaxBatch(emb, labels, probe, margin, lambda, kNoGrad,
                                 false);
          },
          W.t.v[i], 1e-6);
      CHECK(RelErr(W.t.g[i], fd) < 1e-4);
    }
  }
}

TEST_CASE("angular softmax is finite and margin-free at zero angle") {
  int p = 4, classes = 3;
  Param<double> W;
  W.name = "W";
  W.t.Resize(classes, p, 1, 1);
  // Orthonormal rows.
  for (int j = 0; j < classes; ++j) W.t.v[static_cast<size_t>(j) * p + j] = 1.0;
  Tensor<double> emb(1, p, 1, 1);
  emb.v = {2.0, 0.0, 0.0, 0.0};  // exactly parallel to class row 0

  // At theta 0 the margin leaves the target logit at ||f||.
  Tensor<double> grad_emb;
  for (int margin : {2, 3, 4}) {
    double loss = ASoftmaxBatch(emb, {0}, W, margin, 5.0, &grad_emb, false);
    double z = std::exp(2.0) + std::exp(0.0) + std::exp(0.0);
    CHECK(RelErr(loss, std::log(z) - 2.0) < 1e-12);
    for (double g : grad_emb.v) CHECK(std::isfinite(g));
  }

  // Contract violations throw.
  CHECK_THROWS_AS(ASoftmaxBatch(emb, {0}, W, 5, 5.0, kNoGrad, false), Error);
  CHECK_THROWS_AS(ASoftmaxBatch(emb, {0}, W, 2, -1.0, kNoGrad, false), Error);
  Tensor<double> zero(1, p, 1, 1);
  CHECK_THROWS_AS(ASoftmaxBatch(zero, {0}, W, 2, 5.0, kNoGrad, false), Error);
  Param<double> bad = W;
  bad.t.v[0] = 3.0;
  CHECK_THROWS_AS(ASoftmaxBatch(emb, {0}, bad, 2, 5.0, kNoGrad, false), Error);
}

TEST_CASE("squared within-sample distance matches hand values") {
  std::vector<double> fc = {1.0, 2.0};
  std::vector<double> fn = {0.0, 0.0};
  std::vector<double> gc, gn;
  CHECK(MseWithin(fc, fn, &gc, &gn) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(gc == std::vector<double>{1.0, 2.0});
  CHECK(gn == std::vector<double>{-1.0, -2.0});
  CHECK(MseWithin(fc, fc) == 0.0);
  CHECK_THROWS_AS(MseWithin(fc, std::vector<double>{1.0}), Error);
}

TEST_CASE("squared within-sample gradient matches finite differences") {
  RandomStream rng(51);
  int p = 16;
  std::vector<double> fc(p), fn(p);
  for (auto &x : fc) x = rng.Normal();
  for (auto &x : fn) x = rng.Normal();
  std::vector<double> gc, gn;
  MseWithin(fc, fn, &gc, &gn);
  for (int d = 0; d < p; ++d) {
    double fd_c = CentralDiff(
        [&](double x) {
          std::vector<double> probe = fc;
          probe[static_cast<size_t>(d)] = x;
          return MseWithin(probe, fn);
        },
        fc[static_cast<size_t>(d)], 1e-4);
    double fd_n = CentralDiff(
        [&](double x) {
          std::vector<double> probe = fn;
          probe[static_cast<size_t>(d)] = x;
          return MseWithin(fc, probe);
        },
        fn[static_cast<size_t>(d)], 1e-4);
    // The loss is quadratic, so central differences are nearly exact.
    CHECK(RelErr(gc[static_cast<size_t>(d)], fd_c) < 1e-8);
    CHECK(RelErr(gn[static_cast<size_t>(d)], fd_n) < 1e-8);
  }
}

TEST_CASE("cosine within-sample distance matches hand values") {
  std::vector<double> ex = {1.0, 0.0};
  std::vector<double> ey = {0.0, 1.0};
  CHECK(CosineWithin(ex, ey) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(CosineWithin(ex, ex) == doctest::Approx(0.0).epsilon(1e-15));
  std::vector<double> neg = {-1.0, 0.0};
  CHECK(CosineWithin(ex, neg) == doctest::Approx(2.0).epsilon(1e-15));

  // Scale invariance in both arguments.
  RandomStream rng(61);
  std::vector<double> a(8), b(8);
  for (auto &x : a) x = rng.Normal();
  for (auto &x : b) x = rng.Normal();
  std::vector<double> a3 = a, b7 = b;
  for (auto &x : a3) x *= 3.0;
  for (auto &x : b7) x *= 0.7;
  CHECK(CosineWithin(a3, b7) == doctest::Approx(CosineWithin(a, b)).epsilon(1e-12));

  std::vector<double> zero = {0.0, 0.0};
  CHECK_THROWS_AS(CosineWithin(ex, zero), Error);
}

TEST_CASE("cosine within-sample gradient matches finite differences") {
  RandomStream rng(71);
  int p = 12;
  std::vector<double> fc(p), fn(p);
  for (auto &x : fc) x = rng.Normal();
  for (auto &x : fn) x = rng.Normal();
  std::vector<double> gc, gn;
  CosineWithin(fc, fn, &gc, &gn);
  for (int d = 0; d < p; ++d) {
    double fd_c = CentralDiff(
        [&](double x) {
          std::vector<double> probe = fc;
          probe[static_cast<size_t>(d)] = x;
          return CosineWithin(probe, fn);
        },
        fc[static_cast<size_t>(d)], 1e-6);
    double fd_n = CentralDiff(
        [&](double x) {
          std::vector<double> probe = fn;
          probe[static_cast<size_t>(d)] = x;
          return CosineWithin(fc, probe);
        },
        fn[static_cast<size_t>(d)], 1e-6);
    CHECK(RelErr(gc[static_cast<size_t>(d)], fd_c) < 1e-4);
    CHECK(RelErr(gn[static_cast<size_t>(d)], fd_n) < 1e-4);
  }
}
