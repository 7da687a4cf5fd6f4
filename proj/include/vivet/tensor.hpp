// vivet/tensor.hpp
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

#ifndef VIVET_TENSOR_HPP_
#define VIVET_TENSOR_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "vivet/common.hpp"

namespace vivet {

// Dense row-major tensor, at most 4-D (batch, channels, height, width).
// Lower-rank data uses trailing size-1 axes: a matrix is [n, c, 1, 1].
// The gradient buffer is allocated lazily by EnsureGrad.
template <typename T>
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;
  std::vector<T> g;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_) { Resize(n_, c_, h_, w_); }

  int64_t Size() const {
    return static_cast<int64_t>(n) * c * h * w;
  }

  void Resize(int n_, int c_, int h_, int w_) {
    Require(n_ > 0 && c_ > 0 && h_ > 0 && w_ > 0, "Tensor: nonpositive dim");
    n = n_;
    c = c_;
    h = h_;
    w = w_;
    v.assign(static_cast<size_t>(Size()), T(0));
    g.clear();
  }

  bool SameShape(const Tensor &o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }

  int64_t Index(int in, int ic, int ih, int iw) const {
    return ((static_cast<int64_t>(in) * c + ic) * h + ih) * w + iw;
  }

  T &At(int in, int ic, int ih, int iw) { return v[Index(in, ic, ih, iw)]; }
  T At(int in, int ic, int ih, int iw) const { return v[Index(in, ic, ih, iw)]; }

  void EnsureGrad() {
    if (g.size() != v.size()) g.assign(v.size(), T(0));
  }

  void ZeroGrad() {
    if (!g.empty()) std::fill(g.begin(), g.end(), T(0));
  }

  bool AllFinite() const {
    for (T x : v)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }
};

// Output spatial size of a convolution: floor((in + 2*pad - k) / stride) + 1.
// With the 3x3/pad-1 and 1x1/pad-0 kernels used here this equals
// ceil(in / stride), so odd extents never vanish under stride 2.
inline int ConvOutSize(int in, int k, int stride, int pad) {
  Require(in + 2 * pad >= k, "ConvOutSize: kernel larger than padded input");
  return (in + 2 * pad - k) / stride + 1;
}

}  // namespace vivet

#endif  // VIVET_TENSOR_HPP_
