// vivet/losses.hpp
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
// Identification losses (cross-entropy, angular-margin softmax) and the two
// within-sample losses that pull a noisy utterance's embedding toward its
// clean twin: squared-distance (1/p)*||f_c - f_n||^2 and cosine distance
// 1 - cos(f_c, f_n).

#ifndef VIVET_LOSSES_HPP_
#define VIVET_LOSSES_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "vivet/layers.hpp"
#include "vivet/tensor.hpp"

namespace vivet {

// cos(m*theta) as a polynomial in c = cos(theta), for m in [1, 4].
inline double CosM(double c, int m) {
  switch (m) {
    case 1: return c;
    case 2: return 2.0 * c * c - 1.0;
    case 3: return (4.0 * c * c - 3.0) * c;
    case 4: return 8.0 * c * c * (c * c - 1.0) + 1.0;
  }
  throw Error("CosM: margin must be in [1, 4]");
}

inline double CosMPrime(double c, int m) {
  switch (m) {
    case 1: return 1.0;
    case 2: return 4.0 * c;
    case 3: return 12.0 * c * c - 3.0;
    case 4: return (32.0 * c * c - 16.0) * c;
  }
  throw Error("CosMPrime: margin must be in [1, 4]");
}

// Mean -log softmax(logits)[label] over the batch, stabilized by max
// subtraction.  grad_logits (if non-null) receives d(mean loss)/d(logits).
template <typename T>
double CrossEntropyBatch(const Tensor<T> &logits, const std::vector<int> &labels,
                         Tensor<T> *grad_logits) {
  int n = logits.n, k = logits.c;
  Require(logits.h == 1 && logits.w == 1, "CrossEntropyBatch: logits must be [N, K]");
  Require(static_cast<size_t>(n) == labels.size(),
          "CrossEntropyBatch: batch/label count mismatch");
  if (grad_logits) grad_logits->Resize(n, k, 1, 1);

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    Require(labels[static_cast<size_t>(i)] >= 0 && labels[static_cast<size_t>(i)] < k,
            "CrossEntropyBatch: label out of range");
    const T *row = logits.v.data() + static_cast<int64_t>(i) * k;
    double mx = static_cast<double>(row[0]);
    for (int j = 1; j < k; ++j) mx = std::max(mx, static_cast<double>(row[j]));
    double z = 0.0;
    for (int j = 0; j < k; ++j) z += std::exp(static_cast<double>(row[j]) - mx);
    int y = labels[static_cast<size_t>(i)];
    total += std::log(z) - (static_cast<double>(row[y]) - mx);
    if (grad_logits) {
      T *g = grad_logits->v.data() + static_cast<int64_t>(i) * k;
      for (int j = 0; j < k; ++j) {
        double p = std::exp(static_cast<double>(row[j]) - mx) / z;
        g[j] = static_cast<T>((p - (j == y ? 1.0 : 0.0)) / n);
      }
    }
  }
  return total / n;
}

// Angular-margin softmax over embeddings.  W holds one unit-norm row per
// class (checked loosely; the trainer renormalizes after every update).  The
// target logit is ||f|| * (lambda*cos(theta) + psi(theta)) / (1 + lambda)
// with psi(theta) = (-1)^k cos(m*theta) - 2k on [k*pi/m, (k+1)*pi/m]; other
// logits are plain w_j . f.  Returns the mean loss; writes d(mean)/d(emb)
// into grad_emb and accumulates d(mean)/dW into W.t.g when train is true.
template <typename T>
double ASoftmaxBatch(const Tensor<T> &emb, const std::vector<int> &labels,
                     Param<T> &W, int margin, double lambda, Tensor<T> *grad_emb,
                     bool train) {
  int n = emb.n, p = emb.c, k_classes = W.t.n;
  Require(emb.h == 1 && emb.w == 1, "ASoftmaxBatch: embedding must be [N, p]");
  Require(W.t.c == p, "ASoftmaxBatch: W/embedding dimension mismatch");
  Require(static_cast<size_t>(n) == labels.size(),
          "ASoftmaxBatch: batch/label count mismatch");
  Require(margin >= 1 && margin <= 4, "ASoftmaxBatch: margin must be in [1, 4]");
  Require(lambda >= 0.0, "ASoftmaxBatch: lambda must be nonnegative");
  for (int j = 0; j < k_classes; ++j) {
    double norm = 0.0;
    for (int i = 0; i < p; ++i) {
      double x = static_cast<double>(W.t.v[static_cast<size_t>(j) * p + i]);
      norm += x * x;
    }
    Require(std::fabs(std::sqrt(norm) - 1.0) < 2e-2,
            "ASoftmaxBatch: class rows must be unit-norm");
  }

  if (grad_emb) grad_emb->Resize(n, p, 1, 1);
  if (train) W.t.EnsureGrad();

  double total = 0.0;
  std::vector<double> logit(static_cast<size_t>(k_classes));
  for (int i = 0; i < n; ++i) {
    const T *f = emb.v.data() + static_cast<int64_t>(i) * p;
    double fnorm = 0.0;
    for (int d = 0; d < p; ++d)
      fnorm += static_cast<double>(f[d]) * static_cast<double>(f[d]);
    fnorm = std::sqrt(fnorm);
    Require(fnorm > 0.0, "ASoftmaxBatch: zero-norm embedding");

    int y = labels[static_cast<size_t>(i)];
    Require(y >= 0 && y < k_classes, "ASoftmaxBatch: label out of range");
    for (int j = 0; j < k_classes; ++j) {
      double dot = 0.0;
      const T *wj = W.t.v.data() + static_cast<size_t>(j) * p;
      for (int d = 0; d < p; ++d)
        dot += static_cast<double>(wj[d]) * static_cast<double>(f[d]);
      logit[static_cast<size_t>(j)] = dot;
    }

    double c_raw = logit[static_cast<size_t>(y)] / fnorm;
    bool clipped = (c_raw <= -1.0 || c_raw >= 1.0);
    double c = std::clamp(c_raw, -1.0, 1.0);
    double theta = std::acos(c);
    int k = std::min(margin - 1,
                     static_cast<int>(std::floor(margin * theta / M_PI)));
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double psi = sign * CosM(c, margin) - 2.0 * k;
    double g = (lambda * c + psi) / (1.0 + lambda);
    double gprime =
        clipped ? 0.0 : (lambda + sign * CosMPrime(c, margin)) / (1.0 + lambda);
    logit[static_cast<size_t>(y)] = fnorm * g;

    double mx = logit[0];
    for (int j = 1; j < k_classes; ++j) mx = std::max(mx, logit[static_cast<size_t>(j)]);
    double z = 0.0;
    for (int j = 0; j < k_classes; ++j) z += std::exp(logit[static_cast<size_t>(j)] - mx);
    total += std::log(z) - (logit[static_cast<size_t>(y)] - mx);

    if (!grad_emb && !train) continue;
    for (int j = 0; j < k_classes; ++j) {
      double prob = std::exp(logit[static_cast<size_t>(j)] - mx) / z;
      double dj = (prob - (j == y ? 1.0 : 0.0)) / n;
      const T *wj = W.t.v.data() + static_cast<size_t>(j) * p;
      if (j != y) {
        if (grad_emb) {
          T *ge = grad_emb->v.data() + static_cast<int64_t>(i) * p;
          for (int d = 0; d < p; ++d)
            ge[d] += static_cast<T>(dj * static_cast<double>(wj[d]));
        }
        if (train) {
          T *gw = W.t.g.data() + static_cast<size_t>(j) * p;
          for (int d = 0; d < p; ++d)
            gw[d] += static_cast<T>(dj * static_cast<double>(f[d]));
        }
      } else {
        // d logit_y / df = g * fhat + g' * (w_y - c * fhat)
        // d logit_y / dW_y = g' * f
        if (grad_emb) {
          T *ge = grad_emb->v.data() + static_cast<int64_t>(i) * p;
          for (int d = 0; d < p; ++d) {
            double fhat = static_cast<double>(f[d]) / fnorm;
            ge[d] += static_cast<T>(
                dj * (g * fhat + gprime * (static_cast<double>(wj[d]) - c * fhat)));
          }
        }
        if (train) {
          T *gw = W.t.g.data() + static_cast<size_t>(y) * p;
          for (int d = 0; d < p; ++d)
            gw[d] += static_cast<T>(dj * gprime * static_cast<double>(f[d]));
        }
      }
    }
  }
  return total / n;
}

// (1/p) * ||f_c - f_n||^2.  Gradients (if non-null): d/df_n = (2/p)(f_n - f_c)
// and d/df_c its negation.
template <typename T>
double MseWithin(const T *fc, const T *fn, int p, T *gc, T *gn) {
  Require(p > 0, "MseWithin: empty embeddings");
  double acc = 0.0;
  for (int d = 0; d < p; ++d) {
    double diff = static_cast<double>(fc[d]) - static_cast<double>(fn[d]);
    acc += diff * diff;
    if (gn) gn[d] = static_cast<T>(-2.0 * diff / p);
    if (gc) gc[d] = static_cast<T>(2.0 * diff / p);
  }
  return acc / p;
}

// 1 - (f_c . f_n) / (||f_c|| ||f_n||), with gradients by the quotient rule.
template <typename T>
double CosineWithin(const T *fc, const T *fn, int p, T *gc, T *gn) {
  Require(p > 0, "CosineWithin: empty embeddings");
  double dot = 0.0, nc = 0.0, nn = 0.0;
  for (int d = 0; d < p; ++d) {
    double a = static_cast<double>(fc[d]);
    double b = static_cast<double>(fn[d]);
    dot += a * b;
    nc += a * a;
    nn += b * b;
  }
  nc = std::sqrt(nc);
  nn = std::sqrt(nn);
  Require(nc > 0.0 && nn > 0.0, "CosineWithin: zero-norm embedding");
  double cosv = dot / (nc * nn);
  if (gc) {
    for (int d = 0; d < p; ++d)
      gc[d] = static_cast<T>(-(static_cast<double>(fn[d]) / (nc * nn) -
                               cosv * static_cast<double>(fc[d]) / (nc * nc)));
  }
  if (gn) {
    for (int d = 0; d < p; ++d)
      gn[d] = static_cast<T>(-(static_cast<double>(fc[d]) / (nc * nn) -
                               cosv * static_cast<double>(fn[d]) / (nn * nn)));
  }
  return 1.0 - cosv;
}

// Convenience overloads on vectors (unit tests and scoring).
template <typename T>
double MseWithin(const std::vector<T> &fc, const std::vector<T> &fn,
                 std::vector<T> *gc = nullptr, std::vector<T> *gn = nullptr) {
  Require(fc.size() == fn.size(), "MseWithin: dimension mismatch");
  if (gc) gc->assign(fc.size(), T(0));
  if (gn) gn->assign(fn.size(), T(0));
  return MseWithin(fc.data(), fn.data(), static_cast<int>(fc.size()),
                   gc ? gc->data() : nullptr, gn ? gn->data() : nullptr);
}

template <typename T>
double CosineWithin(const std::vector<T> &fc, const std::vector<T> &fn,
                    std::vector<T> *gc = nullptr, std::vector<T> *gn = nullptr) {
  Require(fc.size() == fn.size(), "CosineWithin: dimension mismatch");
  if (gc) gc->assign(fc.size(), T(0));
  if (gn) gn->assign(fn.size(), T(0));
  return CosineWithin(fc.data(), fn.data(), static_cast<int>(fc.size()),
                      gc ? gc->data() : nullptr, gn ? gn->data() : nullptr);
}

}  // namespace vivet

#endif  // VIVET_LOSSES_HPP_
