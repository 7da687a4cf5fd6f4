// vivet/reference_kernels.hpp
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
// Textbook single-threaded versions of the kernels in kernels.hpp, written as
// the most literal loop nests possible.  They exist to test and benchmark the
// parallel kernels against and are not used by the library itself.

#ifndef VIVET_REFERENCE_KERNELS_HPP_
#define VIVET_REFERENCE_KERNELS_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

namespace vivet {
namespace refkern {

template <typename T>
void Conv2dForward(const T *in, int N, int Cin, int H, int W, const T *wt,
                   int Cout, int KH, int KW, int stride, int pad, T *out,
                   int Ho, int Wo) {
  for (int n = 0; n < N; ++n)
    for (int co = 0; co < Cout; ++co)
      for (int ho = 0; ho < Ho; ++ho)
        for (int wo = 0; wo < Wo; ++wo) {
          double acc = 0.0;
          for (int ci = 0; ci < Cin; ++ci)
            for (int kh = 0; kh < KH; ++kh)
              for (int kw = 0; kw < KW; ++kw) {
                int hi = ho * stride + kh - pad;
                int wi = wo * stride + kw - pad;
                if (hi < 0 || hi >= H || wi < 0 || wi >= W) continue;
                acc += static_cast<double>(
                           in[((static_cast<int64_t>(n) * Cin + ci) * H + hi) * W + wi]) *
                       static_cast<double>(
                           wt[((static_cast<int64_t>(co) * Cin + ci) * KH + kh) * KW + kw]);
              }
          out[((static_cast<int64_t>(n) * Cout + co) * Ho + ho) * Wo + wo] =
              static_cast<T>(acc);
        }
}

template <typename T>
void Conv2dBackwardInput(const T *gout, int N, int Cout, int Ho, int Wo,
                         const T *wt, int Cin, int KH, int KW, int stride,
                         int pad, T *gin, int H, int W) {
  std::fill(gin, gin + static_cast<int64_t>(N) * Cin * H * W, T(0));
  for (int n = 0; n < N; ++n)
    for (int co = 0; co < Cout; ++co)
      for (int ho = 0; ho < Ho; ++ho)
        for (int wo = 0; wo < Wo; ++wo) {
          T go = gout[((static_cast<int64_t>(n) * Cout + co) * Ho + ho) * Wo + wo];
          for (int ci = 0; ci < Cin; ++ci)
            for (int kh = 0; kh < KH; ++kh)
              for (int kw = 0; kw < KW; ++kw) {
                int hi = ho * stride + kh - pad;
                int wi = wo * stride + kw - pad;
                if (hi < 0 || hi >= H || wi < 0 || wi >= W) continue;
                gin[((static_cast<int64_t>(n) * Cin + ci) * H + hi) * W + wi] +=
                    go * wt[((static_cast<int64_t>(co) * Cin + ci) * KH + kh) * KW + kw];
              }
        }
}

template <typename T>
void Conv2dBackwardWeight(const T *gout, int N, int Cout, int Ho, int Wo,
                          const T *in, int Cin, int H, int W, int KH, int KW,
                          int stride, int pad, T *gw) {
  for (int co = 0; co < Cout; ++co)
    for (int ci = 0; ci < Cin; ++ci)
      for (int kh = 0; kh < KH; ++kh)
        for (int kw = 0; kw < KW; ++kw) {
          double acc = 0.0;
          for (int n = 0; n < N; ++n)
            for (int ho = 0; ho < Ho; ++ho)
              for (int wo = 0; wo < Wo; ++wo) {
                int hi = ho * stride + kh - pad;
                int wi = wo * stride + kw - pad;
                if (hi < 0 || hi >= H || wi < 0 || wi >= W) continue;
                acc += static_cast<double>(
                           gout[((static_cast<int64_t>(n) * Cout + co) * Ho + ho) * Wo + wo]) *
                       static_cast<double>(
                           in[((static_cast<int64_t>(n) * Cin + ci) * H + hi) * W + wi]);
              }
          gw[((static_cast<int64_t>(co) * Cin + ci) * KH + kh) * KW + kw] +=
              static_cast<T>(acc);
        }
}

template <typename T>
void BatchNormForwardTrain(const T *in, int N, int C, int H, int W,
                           const T *gamma, const T *beta, double eps, T *out,
                           T *mean, T *var, T *xhat) {
  int64_t plane = static_cast<int64_t>(H) * W;
  int64_t m = static_cast<int64_t>(N) * plane;
  for (int c = 0; c < C; ++c) {
    double sum = 0.0;
    for (int n = 0; n < N; ++n)
      for (int64_t i = 0; i < plane; ++i)
        sum += static_cast<double>(in[(static_cast<int64_t>(n) * C + c) * plane + i]);
    double mu = sum / static_cast<double>(m);
    double sq = 0.0;
    for (int n = 0; n < N; ++n)
      for (int64_t i = 0; i < plane; ++i) {
        double d =
            static_cast<double>(in[(static_cast<int64_t>(n) * C + c) * plane + i]) - mu;
        sq += d * d;
      }
    double v = sq / static_cast<double>(m);
    mean[c] = static_cast<T>(mu);
    var[c] = static_cast<T>(v);
    double s = 1.0 / std::sqrt(v + eps);
    for (int n = 0; n < N; ++n)
      for (int64_t i = 0; i < plane; ++i) {
        int64_t at = (static_cast<int64_t>(n) * C + c) * plane + i;
        double x = (static_cast<double>(in[at]) - mu) * s;
        xhat[at] = static_cast<T>(x);
        out[at] = static_cast<T>(static_cast<double>(gamma[c]) * x +
                                 static_cast<double>(beta[c]));
      }
  }
}

template <typename T>
void BatchNormBackward(const T *gout, const T *xhat, int N, int C, int H, int W,
                       const T *gamma, const T *var, double eps, T *gin,
                       T *ggamma, T *gbeta) {
  int64_t plane = static_cast<int64_t>(H) * W;
  int64_t m = static_cast<int64_t>(N) * plane;
  for (int c = 0; c < C; ++c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (int n = 0; n < N; ++n)
      for (int64_t i = 0; i < plane; ++i) {
        int64_t at = (static_cast<int64_t>(n) * C + c) * plane + i;
        sum_g += static_cast<double>(gout[at]);
        sum_gx += static_cast<double>(gout[at]) * static_cast<double>(xhat[at]);
      }
    ggamma[c] += static_cast<T>(sum_gx);
    gbeta[c] += static_cast<T>(sum_g);
    double s = 1.0 / std::sqrt(static_cast<double>(var[c]) + eps);
    for (int n = 0; n < N; ++n)
      for (int64_t i = 0; i < plane; ++i) {
        int64_t at = (static_cast<int64_t>(n) * C + c) * plane + i;
        double d = static_cast<double>(gout[at]) -
                   sum_g / static_cast<double>(m) -
                   static_cast<double>(xhat[at]) * sum_gx / static_cast<double>(m);
        gin[at] = static_cast<T>(static_cast<double>(gamma[c]) * s * d);
      }
  }
}

template <typename T>
void LinearForward(const T *in, int N, int Din, const T *wt, const T *b,
                   int Dout, T *out) {
  for (int n = 0; n < N; ++n)
    for (int o = 0; o < Dout; ++o) {
      double acc = b ? static_cast<double>(b[o]) : 0.0;
      for (int i = 0; i < Din; ++i)
        acc += static_cast<double>(in[static_cast<int64_t>(n) * Din + i]) *
               static_cast<double>(wt[static_cast<int64_t>(o) * Din + i]);
      out[static_cast<int64_t>(n) * Dout + o] = static_cast<T>(acc);
    }
}

template <typename T>
void GspForward(const T *in, int N, int C, int H, int W, T *out, T *mu_save,
                T *sigma_save) {
  int64_t plane = static_cast<int64_t>(H) * W;
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c) {
      const T *p = in + (static_cast<int64_t>(n) * C + c) * plane;
      double sum = 0.0;
      for (int64_t i = 0; i < plane; ++i) sum += static_cast<double>(p[i]);
      double mu = sum / static_cast<double>(plane);
      double sq = 0.0;
      for (int64_t i = 0; i < plane; ++i) {
        double d = static_cast<double>(p[i]) - mu;
        sq += d * d;
      }
      double sigma = std::sqrt(sq / static_cast<double>(plane));
      out[static_cast<int64_t>(n) * 2 * C + c] = static_cast<T>(mu);
      out[static_cast<int64_t>(n) * 2 * C + C + c] = static_cast<T>(sigma);
      mu_save[static_cast<int64_t>(n) * C + c] = static_cast<T>(mu);
      sigma_save[static_cast<int64_t>(n) * C + c] = static_cast<T>(sigma);
    }
}

}  // namespace refkern
}  // namespace vivet

#endif  // VIVET_REFERENCE_KERNELS_HPP_
