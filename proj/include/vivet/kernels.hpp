// vivet/kernels.hpp
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
// Parallel compute kernels.  Work is split so that every output element is
// written by exactly one thread and accumulated in a fixed serial order, so
// results are bit-identical for any thread count.  reference_kernels.hpp
// holds the plain serial versions these are tested against.

#ifndef VIVET_KERNELS_HPP_
#define VIVET_KERNELS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "vivet/common.hpp"

namespace vivet {
namespace kern {

// out[n,co,ho,wo] = sum_{ci,kh,kw} in[n,ci,ho*s+kh-p, wo*s+kw-p] * w[co,ci,kh,kw]
template <typename T>
void Conv2dForward(const T *in, int N, int Cin, int H, int W, const T *wt,
                   int Cout, int KH, int KW, int stride, int pad, T *out,
                   int Ho, int Wo) {
  ParallelFor(0, static_cast<int64_t>(N) * Cout, [&](int64_t job) {
    int n = static_cast<int>(job / Cout);
    int co = static_cast<int>(job % Cout);
    T *out_plane = out + (static_cast<int64_t>(n) * Cout + co) * Ho * Wo;
    std::fill(out_plane, out_plane + static_cast<int64_t>(Ho) * Wo, T(0));
    for (int ci = 0; ci < Cin; ++ci) {
      for (int kh = 0; kh < KH; ++kh) {
        for (int kw = 0; kw < KW; ++kw) {
          T wv = wt[((static_cast<int64_t>(co) * Cin + ci) * KH + kh) * KW + kw];
          int wo_lo = std::max(0, (pad - kw + stride - 1) / stride);
          int wo_hi = std::min(Wo, (W - 1 - kw + pad) / stride + 1);
          for (int ho = 0; ho < Ho; ++ho) {
            int hi = ho * stride + kh - pad;
            if (hi < 0 || hi >= H) continue;
            const T *in_row =
                in + ((static_cast<int64_t>(n) * Cin + ci) * H + hi) * W;
            T *out_row = out_plane + static_cast<int64_t>(ho) * Wo;
            for (int wo = wo_lo; wo < wo_hi; ++wo)
              out_row[wo] += wv * in_row[wo * stride + kw - pad];
          }
        }
      }
    }
  });
}

// Zero-fills gin, then gin[n,ci,hi,wi] = sum gout[n,co,ho,wo] * w[co,ci,kh,kw].
template <typename T>
void Conv2dBackwardInput(const T *gout, int N, int Cout, int Ho, int Wo,
                         const T *wt, int Cin, int KH, int KW, int stride,
                         int pad, T *gin, int H, int W) {
  ParallelFor(0, static_cast<int64_t>(N) * Cin, [&](int64_t job) {
    int n = static_cast<int>(job / Cin);
    int ci = static_cast<int>(job % Cin);
    T *gin_plane = gin + (static_cast<int64_t>(n) * Cin + ci) * H * W;
    std::fill(gin_plane, gin_plane + static_cast<int64_t>(H) * W, T(0));
    for (int co = 0; co < Cout; ++co) {
      for (int kh = 0; kh < KH; ++kh) {
        for (int kw = 0; kw < KW; ++kw) {
          T wv = wt[((static_cast<int64_t>(co) * Cin + ci) * KH + kh) * KW + kw];
          int wo_lo = std::max(0, (pad - kw + stride - 1) / stride);
          int wo_hi = std::min(Wo, (W - 1 - kw + pad) / stride + 1);
          for (int ho = 0; ho < Ho; ++ho) {
            int hi = ho * stride + kh - pad;
            if (hi < 0 || hi >= H) continue;
            const T *gout_row =
                gout + ((static_cast<int64_t>(n) * Cout + co) * Ho + ho) * Wo;
            T *gin_row = gin_plane + static_cast<int64_t>(hi) * W;
            for (int wo = wo_lo; wo < wo_hi; ++wo)
              gin_row[wo * stride + kw - pad] += wv * gout_row[wo];
          }
        }
      }
    }
  });
}

// Accumulates gw[co,ci,kh,kw] += sum_{n,ho,wo} gout[n,co,ho,wo] * in[...].
template <typename T>
void Conv2dBackwardWeight(const T *gout, int N, int Cout, int Ho, int Wo,
                          const T *in, int Cin, int H, int W, int KH, int KW,
                          int stride, int pad, T *gw) {
  ParallelFor(0, static_cast<int64_t>(Cout) * Cin, [&](int64_t job) {
    int co = static_cast<int>(job / Cin);
    int ci = static_cast<int>(job % Cin);
    for (int kh = 0; kh < KH; ++kh) {
      for (int kw = 0; kw < KW; ++kw) {
        int wo_lo = std::max(0, (pad - kw + stride - 1) / stride);
        int wo_hi = std::min(Wo, (W - 1 - kw + pad) / stride + 1);
        T acc = T(0);
        for (int n = 0; n < N; ++n) {
          for (int ho = 0; ho < Ho; ++ho) {
            int hi = ho * stride + kh - pad;
            if (hi < 0 || hi >= H) continue;
            const T *gout_row =
                gout + ((static_cast<int64_t>(n) * Cout + co) * Ho + ho) * Wo;
            const T *in_row =
                in + ((static_cast<int64_t>(n) * Cin + ci) * H + hi) * W;
            for (int wo = wo_lo; wo < wo_hi; ++wo)
              acc += gout_row[wo] * in_row[wo * stride + kw - pad];
          }
        }
        gw[((static_cast<int64_t>(co) * Cin + ci) * KH + kh) * KW + kw] += acc;
      }
    }
  });
}

// Per-channel batch statistics (population variance), normalization, and
// affine transform; saves mean, var and xhat for the backward pass.
template <typename T>
void BatchNormForwardTrain(const T *in, int N, int C, int H, int W,
                           const T *gamma, const T *beta, double eps, T *out,
                           T *mean, T *var, T *xhat) {
  int64_t plane = static_cast<int64_t>(H) * W;
  int64_t m = static_cast<int64_t>(N) * plane;
  ParallelFor(0, C, [&](int64_t c) {
    double sum = 0.0;
    for (int n = 0; n < N; ++n) {
      const T *p = in + (static_cast<int64_t>(n) * C + c) * plane;
      for (int64_t i = 0; i < plane; ++i) sum += static_cast<double>(p[i]);
    }
    double mu = sum / static_cast<double>(m);
    double sq = 0.0;
    for (int n = 0; n < N; ++n) {
      const T *p = in + (static_cast<int64_t>(n) * C + c) * plane;
      for (int64_t i = 0; i < plane; ++i) {
        double d = static_cast<double>(p[i]) - mu;
        sq += d * d;
      }
    }
    double v = sq / static_cast<double>(m);
    mean[c] = static_cast<T>(mu);
    var[c] = static_cast<T>(v);
    double s = 1.0 / std::sqrt(v + eps);
    double gc = static_cast<double>(gamma[c]);
    double bc = static_cast<double>(beta[c]);
    for (int n = 0; n < N; ++n) {
      const T *p = in + (static_cast<int64_t>(n) * C + c) * plane;
      T *xh = xhat + (static_cast<int64_t>(n) * C + c) * plane;
      T *o = out + (static_cast<int64_t>(n) * C + c) * plane;
      for (int64_t i = 0; i < plane; ++i) {
        double x = (static_cast<double>(p[i]) - mu) * s;
        xh[i] = static_cast<T>(x);
        o[i] = static_cast<T>(gc * x + bc);
      }
    }
  });
}

template <typename T>
void BatchNormForwardEval(const T *in, int N, int C, int H, int W,
                          const T *gamma, const T *beta, const T *rmean,
                          const T *rvar, double eps, T *out) {
  int64_t plane = static_cast<int64_t>(H) * W;
  ParallelFor(0, static_cast<int64_t>(N) * C, [&](int64_t job) {
    int n = static_cast<int>(job / C);
    int c = static_cast<int>(job % C);
    double s = 1.0 / std::sqrt(static_cast<double>(rvar[c]) + eps);
    double mu = static_cast<double>(rmean[c]);
    double gc = static_cast<double>(gamma[c]);
    double bc = static_cast<double>(beta[c]);
    const T *p = in + (static_cast<int64_t>(n) * C + c) * plane;
    T *o = out + (static_cast<int64_t>(n) * C + c) * plane;
    for (int64_t i = 0; i < plane; ++i)
      o[i] = static_cast<T>(gc * (static_cast<double>(p[i]) - mu) * s + bc);
  });
}

// Train-mode batchnorm backward.  Accumulates into ggamma/gbeta, overwrites gin.
template <typename T>
void BatchNormBackward(const T *gout, const T *xhat, int N, int C, int H, int W,
                       const T *gamma, const T *var, double eps, T *gin,
                       T *ggamma, T *gbeta) {
  int64_t plane = static_cast<int64_t>(H) * W;
  int64_t m = static_cast<int64_t>(N) * plane;
  ParallelFor(0, C, [&](int64_t c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (int n = 0; n < N; ++n) {
      const T *go = gout + (static_cast<int64_t>(n) * C + c) * plane;
      const T *xh = xhat + (static_cast<int64_t>(n) * C + c) * plane;
      for (int64_t i = 0; i < plane; ++i) {
        sum_g += static_cast<double>(go[i]);
        sum_gx += static_cast<double>(go[i]) * static_cast<double>(xh[i]);
      }
    }
    ggamma[c] += static_cast<T>(sum_gx);
    gbeta[c] += static_cast<T>(sum_g);
    double s = 1.0 / std::sqrt(static_cast<double>(var[c]) + eps);
    double gc = static_cast<double>(gamma[c]);
    double inv_m = 1.0 / static_cast<double>(m);
    for (int n = 0; n < N; ++n) {
      const T *go = gout + (static_cast<int64_t>(n) * C + c) * plane;
      const T *xh = xhat + (static_cast<int64_t>(n) * C + c) * plane;
      T *gi = gin + (static_cast<int64_t>(n) * C + c) * plane;
      for (int64_t i = 0; i < plane; ++i) {
        double d = static_cast<double>(go[i]) - sum_g * inv_m -
                   static_cast<double>(xh[i]) * sum_gx * inv_m;
        gi[i] = static_cast<T>(gc * s * d);
      }
    }
  });
}

template <typename T>
void ReluForward(const T *in, int64_t size, T *out) {
  ParallelFor(0, size, [&](int64_t i) { out[i] = in[i] > T(0) ? in[i] : T(0); });
}

template <typename T>
void ReluBackward(const T *gout, const T *in, int64_t size, T *gin) {
  ParallelFor(0, size,
              [&](int64_t i) { gin[i] = in[i] > T(0) ? gout[i] : T(0); });
}

// out[n,o] = b[o] + sum_i in[n,i] * w[o,i]
template <typename T>
void LinearForward(const T *in, int N, int Din, const T *wt, const T *b,
                   int Dout, T *out) {
  ParallelFor(0, static_cast<int64_t>(N) * Dout, [&](int64_t job) {
    int n = static_cast<int>(job / Dout);
    int o = static_cast<int>(job % Dout);
    const T *in_row = in + static_cast<int64_t>(n) * Din;
    const T *w_row = wt + static_cast<int64_t>(o) * Din;
    T acc = b ? b[o] : T(0);
    for (int i = 0; i < Din; ++i) acc += in_row[i] * w_row[i];
    out[static_cast<int64_t>(n) * Dout + o] = acc;
  });
}

// Overwrites gin; accumulates into gw and gb.
template <typename T>
void LinearBackward(const T *gout, const T *in, int N, int Din, const T *wt,
                    int Dout, T *gin, T *gw, T *gb) {
  ParallelFor(0, N, [&](int64_t n) {
    const T *go = gout + n * Dout;
    T *gi = gin + n * Din;
    for (int i = 0; i < Din; ++i) {
      T acc = T(0);
      for (int o = 0; o < Dout; ++o) acc += go[o] * wt[static_cast<int64_t>(o) * Din + i];
      gi[i] = acc;
    }
  });
  ParallelFor(0, Dout, [&](int64_t o) {
    const int64_t stride = Dout;
    T *gw_row = gw + o * Din;
    T acc_b = T(0);
    for (int n = 0; n < N; ++n) {
      T go = gout[n * stride + o];
      const T *in_row = in + static_cast<int64_t>(n) * Din;
      for (int i = 0; i < Din; ++i) gw_row[i] += go * in_row[i];
      acc_b += go;
    }
    if (gb) gb[o] += acc_b;
  });
}

// out[n, c]     = mean over H*W of in[n,c,:,:]
// out[n, C + c] = population standard deviation over H*W
template <typename T>
void GspForward(const T *in, int N, int C, int H, int W, T *out, T *mu_save,
                T *sigma_save) {
  int64_t plane = static_cast<int64_t>(H) * W;
  ParallelFor(0, static_cast<int64_t>(N) * C, [&](int64_t job) {
    int n = static_cast<int>(job / C);
    int c = static_cast<int>(job % C);
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
    mu_save[job] = static_cast<T>(mu);
    sigma_save[job] = static_cast<T>(sigma);
  });
}

// gin[n,c,i] = gmu/M + gsigma * (x_i - mu) / (M * sigma); the sigma branch is
// defined as 0 where sigma == 0 (subgradient at the non-differentiable point).
template <typename T>
void GspBackward(const T *gout, const T *in, int N, int C, int H, int W,
                 const T *mu_save, const T *sigma_save, T *gin) {
  int64_t plane = static_cast<int64_t>(H) * W;
  ParallelFor(0, static_cast<int64_t>(N) * C, [&](int64_t job) {
    int n = static_cast<int>(job / C);
    int c = static_cast<int>(job % C);
    const T *p = in + (static_cast<int64_t>(n) * C + c) * plane;
    T *gi = gin + (static_cast<int64_t>(n) * C + c) * plane;
    double gmu = static_cast<double>(gout[static_cast<int64_t>(n) * 2 * C + c]);
    double gsig =
        static_cast<double>(gout[static_cast<int64_t>(n) * 2 * C + C + c]);
    double mu = static_cast<double>(mu_save[job]);
    double sigma = static_cast<double>(sigma_save[job]);
    double inv_m = 1.0 / static_cast<double>(plane);
    double sig_coef = (sigma > 0.0) ? gsig * inv_m / sigma : 0.0;
    for (int64_t i = 0; i < plane; ++i)
      gi[i] = static_cast<T>(gmu * inv_m +
                             sig_coef * (static_cast<double>(p[i]) - mu));
  });
}

}  // namespace kern
}  // namespace vivet

#endif  // VIVET_KERNELS_HPP_
