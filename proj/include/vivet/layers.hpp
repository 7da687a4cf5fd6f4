// vivet/layers.hpp
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
// Layers over the kernels, each saving what its backward pass needs.  The
// model is a fixed sequence of these, so backward is a hand-written reverse
// walk rather than a general graph.

#ifndef VIVET_LAYERS_HPP_
#define VIVET_LAYERS_HPP_

#include <map>
#include <string>
#include <vector>

#include "vivet/common.hpp"
#include "vivet/kernels.hpp"
#include "vivet/tensor.hpp"

namespace vivet {

enum class Mode { kTrain, kEval };

template <typename T>
struct Param {
  std::string name;
  Tensor<T> t;
  bool trainable = true;
};

template <typename T>
class ParamStore {
 public:
  int Add(const std::string &name, int n, int c, int h, int w,
          bool trainable = true) {
    Require(index_.find(name) == index_.end(),
            "ParamStore: duplicate parameter name " + name);
    Param<T> p;
    p.name = name;
    p.t.Resize(n, c, h, w);
    p.trainable = trainable;
    index_[name] = static_cast<int>(params_.size());
    params_.push_back(std::move(p));
    return static_cast<int>(params_.size()) - 1;
  }

  Param<T> &At(int idx) { return params_[static_cast<size_t>(idx)]; }
  const Param<T> &At(int idx) const { return params_[static_cast<size_t>(idx)]; }

  Param<T> *Find(const std::string &name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &params_[static_cast<size_t>(it->second)];
  }

  size_t Count() const { return params_.size(); }

  void ZeroGrad() {
    for (auto &p : params_) {
      p.t.EnsureGrad();
      p.t.ZeroGrad();
    }
  }

 private:
  std::vector<Param<T>> params_;
  std::map<std::string, int> index_;
};

template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(ParamStore<T> *store, const std::string &name, int cin, int cout,
         int k, int stride, int pad, RandomStream *rng)
      : cin_(cin), cout_(cout), k_(k), stride_(stride), pad_(pad) {
    w_idx_ = store->Add(name + ".weight", cout, cin, k, k);
    Tensor<T> &w = store->At(w_idx_).t;
    double std_dev = std::sqrt(2.0 / (static_cast<double>(cin) * k * k));
    for (auto &x : w.v) x = static_cast<T>(rng->Normal() * std_dev);
  }

  void Forward(ParamStore<T> *store, const Tensor<T> &in, Tensor<T> *out) {
    Require(in.c == cin_, "Conv2d: channel mismatch");
    in_saved_ = in;
    int ho = ConvOutSize(in.h, k_, stride_, pad_);
    int wo = ConvOutSize(in.w, k_, stride_, pad_);
    out->Resize(in.n, cout_, ho, wo);
    kern::Conv2dForward(in.v.data(), in.n, cin_, in.h, in.w,
                        store->At(w_idx_).t.v.data(), cout_, k_, k_, stride_,
                        pad_, out->v.data(), ho, wo);
  }

  void Backward(ParamStore<T> *store, const Tensor<T> &gout, Tensor<T> *gin) {
    Param<T> &w = store->At(w_idx_);
    w.t.EnsureGrad();
    gin->Resize(in_saved_.n, in_saved_.c, in_saved_.h, in_saved_.w);
    kern::Conv2dBackwardInput(gout.v.data(), gout.n, cout_, gout.h, gout.w,
                              w.t.v.data(), cin_, k_, k_, stride_, pad_,
                              gin->v.data(), in_saved_.h, in_saved_.w);
    kern::Conv2dBackwardWeight(gout.v.data(), gout.n, cout_, gout.h, gout.w,
                               in_saved_.v.data(), cin_, in_saved_.h,
                               in_saved_.w, k_, k_, stride_, pad_,
                               w.t.g.data());
  }

  int WeightIndex() const { return w_idx_; }

 private:
  int w_idx_ = -1;
  int cin_ = 0, cout_ = 0, k_ = 0, stride_ = 1, pad_ = 0;
  Tensor<T> in_saved_;
};

template <typename T>
class BatchNorm2d {
 public:
  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

  BatchNorm2d() = default;
  BatchNorm2d(ParamStore<T> *store, const std::string &name, int channels,
              double gamma_init = 1.0)
      : channels_(channels) {
    gamma_idx_ = store->Add(name + ".gamma", channels, 1, 1, 1);
    beta_idx_ = store->Add(name + ".beta", channels, 1, 1, 1);
    rmean_idx_ = store->Add(name + ".running_mean", channels, 1, 1, 1, false);
    rvar_idx_ = store->Add(name + ".running_var", channels, 1, 1, 1, false);
    for (auto &x : store->At(gamma_idx_).t.v) x = T(gamma_init);
    for (auto &x : store->At(rvar_idx_).t.v) x = T(1);
  }

  void Forward(ParamStore<T> *store, const Tensor<T> &in, Mode mode,
               Tensor<T> *out) {
    Require(in.c == channels_, "BatchNorm2d: channel mismatch");
    out->Resize(in.n, in.c, in.h, in.w);
    Tensor<T> &gamma = store->At(gamma_idx_).t;
    Tensor<T> &beta = store->At(beta_idx_).t;
    Tensor<T> &rmean = store->At(rmean_idx_).t;
    Tensor<T> &rvar = store->At(rvar_idx_).t;
    if (mode == Mode::kTrain) {
      mean_.Resize(channels_, 1, 1, 1);
      var_.Resize(channels_, 1, 1, 1);
      xhat_.Resize(in.n, in.c, in.h, in.w);
      kern::BatchNormForwardTrain(in.v.data(), in.n, in.c, in.h, in.w,
                                  gamma.v.data(), beta.v.data(), kEps,
                                  out->v.data(), mean_.v.data(), var_.v.data(),
                                  xhat_.v.data());
      for (int c = 0; c < channels_; ++c) {
        rmean.v[c] = static_cast<T>((1.0 - kMomentum) * rmean.v[c] +
                                    kMomentum * mean_.v[c]);
        rvar.v[c] = static_cast<T>((1.0 - kMomentum) * rvar.v[c] +
                                   kMomentum * var_.v[c]);
      }
    } else {
      kern::BatchNormForwardEval(in.v.data(), in.n, in.c, in.h, in.w,
                                 gamma.v.data(), beta.v.data(), rmean.v.data(),
                                 rvar.v.data(), kEps, out->v.data());
    }
  }

  // Train-mode only; the trainer never backpropagates through an eval pass.
  void Backward(ParamStore<T> *store, const Tensor<T> &gout, Tensor<T> *gin) {
    Require(xhat_.Size() == gout.Size(), "BatchNorm2d: no saved train forward");
    Param<T> &gamma = store->At(gamma_idx_);
    Param<T> &beta = store->At(beta_idx_);
    gamma.t.EnsureGrad();
    beta.t.EnsureGrad();
    gin->Resize(gout.n, gout.c, gout.h, gout.w);
    kern::BatchNormBackward(gout.v.data(), xhat_.v.data(), gout.n, gout.c,
                            gout.h, gout.w, gamma.t.v.data(), var_.v.data(),
                            kEps, gin->v.data(), gamma.t.g.data(),
                            beta.t.g.data());
  }

 private:
  int gamma_idx_ = -1, beta_idx_ = -1, rmean_idx_ = -1, rvar_idx_ = -1;
  int channels_ = 0;
  Tensor<T> mean_, var_, xhat_;
};

template <typename T>
class Relu {
 public:
  void Forward(const Tensor<T> &in, Tensor<T> *out) {
    in_saved_ = in;
    out->Resize(in.n, in.c, in.h, in.w);
    kern::ReluForward(in.v.data(), in.Size(), out->v.data());
  }

  void Backward(const Tensor<T> &gout, Tensor<T> *gin) {
    gin->Resize(in_saved_.n, in_saved_.c, in_saved_.h, in_saved_.w);
    kern::ReluBackward(gout.v.data(), in_saved_.v.data(), in_saved_.Size(),
                       gin->v.data());
  }

 private:
  Tensor<T> in_saved_;
};

// Inverted dropout: train-mode output is x * mask / (1 - p), eval is identity.
// The mask is drawn serially from the caller's stream so a fixed seed gives a
// fixed mask regardless of thread count.
template <typename T>
class Dropout {
 public:
  explicit Dropout(double p = 0.5) : p_(p) {
    Require(p >= 0.0 && p < 1.0, "Dropout: p must be in [0, 1)");
  }

  void Forward(const Tensor<T> &in, Mode mode, RandomStream *rng,
               Tensor<T> *out) {
    out->Resize(in.n, in.c, in.h, in.w);
    if (mode == Mode::kEval || p_ == 0.0) {
      out->v = in.v;
      mask_.clear();
      return;
    }
    double scale = 1.0 / (1.0 - p_);
    mask_.resize(in.v.size());
    for (size_t i = 0; i < in.v.size(); ++i) {
      mask_[i] = rng->Uniform() >= p_ ? static_cast<T>(scale) : T(0);
      out->v[i] = in.v[i] * mask_[i];
    }
  }

  void Backward(const Tensor<T> &gout, Tensor<T> *gin) {
    gin->Resize(gout.n, gout.c, gout.h, gout.w);
    if (mask_.empty()) {
      gin->v = gout.v;
      return;
    }
    for (size_t i = 0; i < gout.v.size(); ++i) gin->v[i] = gout.v[i] * mask_[i];
  }

 private:
  double p_;
  std::vector<T> mask_;
};

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore<T> *store, const std::string &name, int din, int dout,
         bool bias, RandomStream *rng)
      : din_(din), dout_(dout), has_bias_(bias) {
    w_idx_ = store->Add(name + ".weight", dout, din, 1, 1);
    Tensor<T> &w = store->At(w_idx_).t;
    double std_dev = std::sqrt(1.0 / static_cast<double>(din));
    for (auto &x : w.v) x = static_cast<T>(rng->Normal() * std_dev);
    if (bias) b_idx_ = store->Add(name + ".bias", dout, 1, 1, 1);
  }

  // Input [N, din, 1, 1] -> output [N, dout, 1, 1].
  void Forward(ParamStore<T> *store, const Tensor<T> &in, Tensor<T> *out) {
    Require(in.c == din_ && in.h == 1 && in.w == 1, "Linear: shape mismatch");
    in_saved_ = in;
    out->Resize(in.n, dout_, 1, 1);
    const T *b = has_bias_ ? store->At(b_idx_).t.v.data() : nullptr;
    kern::LinearForward(in.v.data(), in.n, din_, store->At(w_idx_).t.v.data(),
                        b, dout_, out->v.data());
  }

  void Backward(ParamStore<T> *store, const Tensor<T> &gout, Tensor<T> *gin) {
    Param<T> &w = store->At(w_idx_);
    w.t.EnsureGrad();
    T *gb = nullptr;
    if (has_bias_) {
      Param<T> &b = store->At(b_idx_);
      b.t.EnsureGrad();
      gb = b.t.g.data();
    }
    gin->Resize(in_saved_.n, din_, 1, 1);
    kern::LinearBackward(gout.v.data(), in_saved_.v.data(), in_saved_.n, din_,
                         w.t.v.data(), dout_, gin->v.data(), w.t.g.data(), gb);
  }

  int WeightIndex() const { return w_idx_; }
  int BiasIndex() const { return b_idx_; }

 private:
  int w_idx_ = -1, b_idx_ = -1;
  int din_ = 0, dout_ = 0;
  bool has_bias_ = false;
  Tensor<T> in_saved_;
};

// Global statistics pooling: [N,C,H,W] -> [N,2C,1,1] with per-channel mean
// and population standard deviation over the spatial extent.
template <typename T>
class Gsp {
 public:
  void Forward(const Tensor<T> &in, Tensor<T> *out) {
    Require(static_cast<int64_t>(in.h) * in.w >= 1, "Gsp: empty spatial extent");
    in_saved_ = in;
    mu_.Resize(in.n, in.c, 1, 1);
    sigma_.Resize(in.n, in.c, 1, 1);
    out->Resize(in.n, 2 * in.c, 1, 1);
    kern::GspForward(in.v.data(), in.n, in.c, in.h, in.w, out->v.data(),
                     mu_.v.data(), sigma_.v.data());
  }

  void Backward(const Tensor<T> &gout, Tensor<T> *gin) {
    gin->Resize(in_saved_.n, in_saved_.c, in_saved_.h, in_saved_.w);
    kern::GspBackward(gout.v.data(), in_saved_.v.data(), in_saved_.n,
                      in_saved_.c, in_saved_.h, in_saved_.w, mu_.v.data(),
                      sigma_.v.data(), gin->v.data());
  }

 private:
  Tensor<T> in_saved_, mu_, sigma_;
};

// Two 3x3 convs with batchnorm, plus an identity shortcut when shapes agree
// or a 1x1 strided projection (with batchnorm) when they do not.
template <typename T>
class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(ParamStore<T> *store, const std::string &name, int cin,
                int cout, int stride, RandomStream *rng)
      : projecting_(stride != 1 || cin != cout) {
    conv1_ = Conv2d<T>(store, name + ".conv1", cin, cout, 3, stride, 1, rng);
    bn1_ = BatchNorm2d<T>(store, name + ".bn1", cout);
    conv2_ = Conv2d<T>(store, name + ".conv2", cout, cout, 3, 1, 1, rng);
    // The branch's closing scale starts at zero: a fresh block computes its
    // shortcut, and training opens the branch gradually.  Without this the
    // stacked random branches can park small nets on the uniform-softmax
    // plateau for entire runs under some init seeds.
    bn2_ = BatchNorm2d<T>(store, name + ".bn2", cout, 0.0);
    if (projecting_) {
      conv_sc_ = Conv2d<T>(store, name + ".shortcut.conv", cin, cout, 1, stride,
                           0, rng);
      bn_sc_ = BatchNorm2d<T>(store, name + ".shortcut.bn", cout);
    }
  }

  void Forward(ParamStore<T> *store, const Tensor<T> &in, Mode mode,
               Tensor<T> *out) {
    Tensor<T> a, b;
    conv1_.Forward(store, in, &a);
    bn1_.Forward(store, a, mode, &b);
    relu1_.Forward(b, &a);
    conv2_.Forward(store, a, &b);
    bn2_.Forward(store, b, mode, &branch_out_);

    if (projecting_) {
      conv_sc_.Forward(store, in, &a);
      bn_sc_.Forward(store, a, mode, &shortcut_out_);
    } else {
      shortcut_out_ = in;
    }
    Require(branch_out_.SameShape(shortcut_out_),
            "ResidualBlock: branch/shortcut shape mismatch");

    sum_.Resize(branch_out_.n, branch_out_.c, branch_out_.h, branch_out_.w);
    for (size_t i = 0; i < sum_.v.size(); ++i)
      sum_.v[i] = branch_out_.v[i] + shortcut_out_.v[i];
    relu_out_.Forward(sum_, out);
  }

  void Backward(ParamStore<T> *store, const Tensor<T> &gout, Tensor<T> *gin) {
    Tensor<T> gsum, a, b;
    relu_out_.Backward(gout, &gsum);

    bn2_.Backward(store, gsum, &a);
    conv2_.Backward(store, a, &b);
    relu1_.Backward(b, &a);
    bn1_.Backward(store, a, &b);
    conv1_.Backward(store, b, gin);

    if (projecting_) {
      bn_sc_.Backward(store, gsum, &a);
      conv_sc_.Backward(store, a, &b);
      for (size_t i = 0; i < gin->v.size(); ++i) gin->v[i] += b.v[i];
    } else {
      for (size_t i = 0; i < gin->v.size(); ++i) gin->v[i] += gsum.v[i];
    }
  }

 private:
  bool projecting_ = false;
  Conv2d<T> conv1_, conv2_, conv_sc_;
  BatchNorm2d<T> bn1_, bn2_, bn_sc_;
  Relu<T> relu1_, relu_out_;
  Tensor<T> branch_out_, shortcut_out_, sum_;
};

}  // namespace vivet

#endif  // VIVET_LAYERS_HPP_
