// tests/acceptance/acceptance_main.cpp
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

// End-to-end acceptance gate.  Prints exactly one PASS/FAIL line per
// criterion on stdout and exits nonzero if any criterion fails.  Progress
// notes go to stderr.  Everything runs single-threaded so the determinism
// checks are meaningful.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vivet/augment.hpp"
#include "vivet/commands.hpp"
#include "vivet/common.hpp"
#include "vivet/corpus.hpp"
#include "vivet/eval.hpp"
#include "vivet/layers.hpp"
#include "vivet/losses.hpp"
#include "vivet/metrics.hpp"
#include "vivet/network.hpp"
#include "vivet/signal.hpp"
#include "vivet/tensor.hpp"
#include "vivet/train.hpp"

using namespace vivet;

namespace {

namespace fs = std::filesystem;

Tensor<double> *const kNoGrad = nullptr;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void Note(const std::string &msg) {
  std::fprintf(stderr, "[acceptance] %s\n", msg.c_str());
  std::fflush(stderr);
}

std::string RootDir() {
  static std::string root = [] {
    fs::path p = fs::temp_directory_path() / "vivet_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
  }();
  return root;
}

double RelErr(double got, double want) {
  double denom = std::max({std::abs(got), std::abs(want), 1e-10});
  return std::abs(got - want) / denom;
}

void FillRandom(std::vector<double> *v, RandomStream *rng, double scale) {
  for (auto &x : *v) x = scale * rng->Normal();
}

double CentralDiff(const std::function<double(double)> &f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Central finite difference along one coordinate of an arbitrary buffer.
double FiniteDiff(double *slot, const std::function<double()> &loss, double h) {
  double keep = *slot;
  *slot = keep + h;
  double up = loss();
  *slot = keep - h;
  double down = loss();
  *slot = keep;
  return (up - down) / (2.0 * h);
}

std::string ReadBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), "acceptance: cannot open " + path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

// ---------------------------------------------------------------------------
// Criterion 1: finite-difference gradient checks for every layer and loss.

NetConfig TinyConfig() {
  NetConfig cfg;
  cfg.stage_channels = {2, 3, 4, 5};
  cfg.stage_blocks = {1, 1, 1, 1};
  cfg.n_mels = 8;
  cfg.embedding_dim = 5;
  cfg.n_classes = 3;
  cfg.dropout_p = 0.0;
  return cfg;
}

Tensor<double> RandomInput(int n, int c, int h, int w, RandomStream *rng) {
  Tensor<double> t(n, c, h, w);
  FillRandom(&t.v, rng, 1.0);
  return t;
}

Tensor<double> RandomEmb(int n, int c, RandomStream *rng, double scale) {
  Tensor<double> t(n, c, 1, 1);
  FillRandom(&t.v, rng, scale);
  return t;
}

// Unit-norm class rows, as the angular head maintains them.
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

// loss = sum_i coef[i] * out[i]; the gradient with respect to out is coef.
struct LinearFunctional {
  std::vector<double> coef;

  LinearFunctional(int64_t size, RandomStream *rng) {
    coef.resize(static_cast<size_t>(size));
    FillRandom(&coef, rng, 1.0);
  }

  double Eval(const Tensor<double> &out) const {
    Require(out.v.size() == coef.size(), "functional size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < coef.size(); ++i) s += coef[i] * out.v[i];
    return s;
  }

  Tensor<double> Grad(const Tensor<double> &like) const {
    Tensor<double> g(like.n, like.c, like.h, like.w);
    g.v = coef;
    return g;
  }
};

// Compares every trainable parameter gradient in `store`, and optionally an
// input gradient, against finite differences; tracks the worst relative error.
void MaxStoreErr(ParamStore<double> *store, const std::function<double()> &loss,
                 double h, double *worst) {
  for (size_t pi = 0; pi < store->Count(); ++pi) {
    Param<double> &p = store->At(static_cast<int>(pi));
    if (!p.trainable) continue;
    Require(p.t.g.size() == p.t.v.size(), "missing gradient for " + p.name);
    for (size_t i = 0; i < p.t.v.size(); ++i) {
      double fd = FiniteDiff(&p.t.v[i], loss, h);
      *worst = std::max(*worst, RelErr(p.t.g[i], fd));
    }
  }
}

void MaxBufferErr(std::vector<double> *buf, const std::vector<double> &grad,
                  const std::function<double()> &loss, double h,
                  double *worst) {
  Require(buf->size() == grad.size(), "gradient buffer size mismatch");
  for (size_t i = 0; i < buf->size(); ++i) {
    double fd = FiniteDiff(&(*buf)[i], loss, h);
    *worst = std::max(*worst, RelErr(grad[i], fd));
  }
}

Outcome Criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  double layers = 0.0, losses = 0.0, mse = 0.0;

  {  // Convolution: weights, bias, input.
    RandomStream rng(111);
    ParamStore<double> store;
    Conv2d<double> conv(&store, "c", 2, 3, 3, 2, 1, &rng);
    Tensor<double> in = RandomInput(2, 2, 5, 6, &rng);
    Tensor<double> out;
    conv.Forward(&store, in, &out);
    LinearFunctional fn(out.Size(), &rng);
    Tensor<double> gin;
    conv.Backward(&store, fn.Grad(out), &gin);
    auto loss = [&]() {
      Tensor<double> o;
      conv.Forward(&store, in, &o);
      return fn.Eval(o);
    };
    MaxStoreErr(&store, loss, 1e-5, &layers);
    MaxBufferErr(&in.v, gin.v, loss, 1e-5, &layers);
  }

  {  // Batch normalization in training mode.
    RandomStream rng(112);
    ParamStore<double> store;
    BatchNorm2d<double> bn(&store, "b", 3);
    Tensor<double> in = RandomInput(3, 3, 4, 4, &rng);
    Tensor<double> out;
    bn.Forward(&store, in, Mode::kTrain, &out);
    LinearFunctional fn(out.Size(), &rng);
    Tensor<double> gin;
    bn.Backward(&store, fn.Grad(out), &gin);
    auto loss = [&]() {
      Tensor<double> o;
      bn.Forward(&store, in, Mode::kTrain, &o);
      return fn.Eval(o);
    };
    MaxStoreErr(&store, loss, 1e-5, &layers);
    MaxBufferErr(&in.v, gin.v, loss, 1e-5, &layers);
  }

  {  // Fully connected layer.
    RandomStream rng(113);
    ParamStore<double> store;
    Linear<double> lin(&store, "l", 6, 4, true, &rng);
    Tensor<double> in = RandomInput(3, 6, 1, 1, &rng);
    Tensor<double> out;
    lin.Forward(&store, in, &out);
    LinearFunctional fn(out.Size(), &rng);
    Tensor<double> gin;
    lin.Backward(&store, fn.Grad(out), &gin);
    auto loss = [&]() {
      Tensor<double> o;
      lin.Forward(&store, in, &o);
      return fn.Eval(o);
    };
    MaxStoreErr(&store, loss, 1e-5, &layers);
    MaxBufferErr(&in.v, gin.v, loss, 1e-5, &layers);
  }

  {  // Global statistics pooling.
    RandomStream rng(114);
    Gsp<double> gsp;
    Tensor<double> in = RandomInput(2, 3, 4, 5, &rng);
    Tensor<double> out;
    gsp.Forward(in, &out);
    LinearFunctional fn(out.Size(), &rng);
    Tensor<double> gin;
    gsp.Backward(fn.Grad(out), &gin);
    auto loss = [&]() {
      Tensor<double> o;
      Gsp<double> probe;
      probe.Forward(in, &o);
      return fn.Eval(o);
    };
    MaxBufferErr(&in.v, gin.v, loss, 1e-5, &layers);
  }

  {  // ReLU, sampled away from the kink.
    RandomStream rng(115);
    Relu<double> relu;
    Tensor<double> in(2, 3, 2, 2);
    for (auto &x : in.v) {
      do {
        x = rng.Normal();
      } while (std::abs(x) < 0.1);
    }
    Tensor<double> out;
    relu.Forward(in, &out);
    LinearFunctional fn(out.Size(), &rng);
    Tensor<double> gin;
    relu.Backward(fn.Grad(out), &gin);
    auto loss = [&]() {
      Tensor<double> o;
      Relu<double> probe;
      probe.Forward(in, &o);
      return fn.Eval(o);
    };
    MaxBufferErr(&in.v, gin.v, loss, 1e-5, &layers);
  }

  {  // Residual blocks: identity shortcut and strided projection.
    RandomStream rng(116);
    struct Variant {
      int cin, cout, stride;
    };
    for (Variant v : {Variant{3, 3, 1}, Variant{2, 4, 2}}) {
      ParamStore<double> store;
      ResidualBlock<double> block(&store, "rb", v.cin, v.cout, v.stride, &rng);
      // Move every trainable parameter off its init value (the closing
      // batchnorm scale starts at zero) so no gradient is vacuously zero.
      for (size_t pi = 0; pi < store.Count(); ++pi) {
        Param<double> &p = store.At(static_cast<int>(pi));
        if (p.trainable) FillRandom(&p.t.v, &rng, 0.7);
      }
      Tensor<double> in = RandomInput(2, v.cin, 6, 6, &rng);
      Tensor<double> out;
      block.Forward(&store, in, Mode::kTrain, &out);
      LinearFunctional fn(out.Size(), &rng);
      Tensor<double> gin;
      block.Backward(&store, fn.Grad(out), &gin);
      auto loss = [&]() {
        Tensor<double> o;
        block.Forward(&store, in, Mode::kTrain, &o);
        return fn.Eval(o);
      };
      MaxStoreErr(&store, loss, 1e-5, &layers);
      MaxBufferErr(&in.v, gin.v, loss, 1e-5, &layers);
    }
  }

  {  // Whole embedding path of the network.
    RandomStream rng(117);
    EmbedNet<double> net(TinyConfig(), 9);
    // Move every trainable parameter off its init value (the closing
    // batchnorm scale starts at zero) so no gradient is vacuously zero.
    for (size_t pi = 0; pi < net.Store().Count(); ++pi) {
      Param<double> &p = net.Store().At(static_cast<int>(pi));
      if (p.trainable) FillRandom(&p.t.v, &rng, 0.7);
    }
    Tensor<double> in = RandomInput(2, 1, 8, 12, &rng);
    Tensor<double> emb = net.ForwardEmbed(in, Mode::kTrain);
    LinearFunctional fn(emb.Size(), &rng);
    net.BackwardFromEmbedding(fn.Grad(emb));
    auto loss = [&]() { return fn.Eval(net.ForwardEmbed(in, Mode::kTrain)); };
    ParamStore<double> &store = net.Store();
    for (size_t pi = 0; pi < store.Count(); ++pi) {
      Param<double> &p = store.At(static_cast<int>(pi));
      if (!p.trainable) continue;
      if (p.name.rfind("classifier", 0) == 0) continue;
      Require(p.t.g.size() == p.t.v.size(), "missing gradient for " + p.name);
      for (size_t i = 0; i < p.t.v.size(); ++i) {
        double fd = FiniteDiff(&p.t.v[i], loss, 1e-5);
        layers = std::max(layers, RelErr(p.t.g[i], fd));
      }
    }
  }

  {  // Classifier head through cross entropy.
    RandomStream rng(118);
    EmbedNet<double> net(TinyConfig(), 10);
    Tensor<double> emb = RandomEmb(3, 5, &rng, 1.0);
    std::vector<int> labels = {0, 2, 1};
    RandomStream dropout_rng(1);
    Tensor<double> logits =
        net.ClassifierForward(emb, Mode::kTrain, &dropout_rng);
    Tensor<double> grad_logits;
    CrossEntropyBatch(logits, labels, &grad_logits);
    Tensor<double> grad_emb;
    net.ClassifierBackward(grad_logits, &grad_emb);
    auto loss = [&]() {
      RandomStream r(1);
      Tensor<double> l = net.ClassifierForward(emb, Mode::kTrain, &r);
      return CrossEntropyBatch(l, labels, kNoGrad);
    };
    ParamStore<double> &store = net.Store();
    for (size_t pi = 0; pi < store.Count(); ++pi) {
      Param<double> &p = store.At(static_cast<int>(pi));
      if (p.name.rfind("classifier", 0) != 0) continue;
      for (size_t i = 0; i < p.t.v.size(); ++i) {
        double fd = FiniteDiff(&p.t.v[i], loss, 1e-6);
        layers = std::max(layers, RelErr(p.t.g[i], fd));
      }
    }
    MaxBufferErr(&emb.v, grad_emb.v, loss, 1e-6, &layers);
  }

  {  // Cross entropy with respect to logits.
    RandomStream rng(120);
    Tensor<double> logits = RandomEmb(4, 6, &rng, 2.0);
    std::vector<int> labels = {5, 0, 3, 3};
    Tensor<double> grad;
    CrossEntropyBatch(logits, labels, &grad);
    for (size_t i = 0; i < logits.v.size(); ++i) {
      double fd = CentralDiff(
          [&](double x) {
            Tensor<double> probe = logits;
            probe.v[i] = x;
            return CrossEntropyBatch(probe, labels, kNoGrad);
          },
          logits.v[i], 1e-6);
      losses = std::max(losses, RelErr(grad.v[i], fd));
    }
  }

  {  // Angular softmax: embedding gradient across margins and anneal weights.
    RandomStream rng(121);
    int n = 3, p = 5, classes = 4;
    Param<double> W = RandomClassifier(classes, p, &rng);
    std::vector<int> labels = {1, 3, 0};
    for (int margin : {2, 3, 4}) {
      for (double lambda : {0.0, 5.0, 1000.0}) {
        Tensor<double> emb = RandomEmb(n, p, &rng, 1.0);
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
          losses = std::max(losses, RelErr(grad_emb.v[i], fd));
        }
      }
    }
  }

  {  // Angular softmax: classifier weight gradient.
    RandomStream rng(122);
    int p = 4, classes = 3;
    Param<double> W = RandomClassifier(classes, p, &rng);
    Tensor<double> emb = RandomEmb(3, p, &rng, 1.2);
    std::vector<int> labels = {2, 0, 1};
    for (int margin : {2, 4}) {
      double lambda = 5.0;
      W.t.g.clear();
      ASoftmaxBatch(emb, labels, W, margin, lambda, kNoGrad, true);
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
        losses = std::max(losses, RelErr(W.t.g[i], fd));
      }
    }
  }

  {  // Squared within-sample distance: quadratic, so nearly exact.
    RandomStream rng(123);
    int p = 16;
    std::vector<double> fc(p), fn(p);
    FillRandom(&fc, &rng, 1.0);
    FillRandom(&fn, &rng, 1.0);
    std::vector<double> gc, gn;
    MseWithin(fc, fn, &gc, &gn);
    for (int d = 0; d < p; ++d) {
      size_t di = static_cast<size_t>(d);
      double fd_c = CentralDiff(
          [&](double x) {
            std::vector<double> probe = fc;
            probe[di] = x;
            return MseWithin(probe, fn);
          },
          fc[di], 1e-4);
      double fd_n = CentralDiff(
          [&](double x) {
            std::vector<double> probe = fn;
            probe[di] = x;
            return MseWithin(fc, probe);
          },
          fn[di], 1e-4);
      mse = std::max({mse, RelErr(gc[di], fd_c), RelErr(gn[di], fd_n)});
    }
  }

  {  // Cosine within-sample distance.
    RandomStream rng(124);
    int p = 12;
    std::vector<double> fc(p), fn(p);
    FillRandom(&fc, &rng, 1.0);
    FillRandom(&fn, &rng, 1.0);
    std::vector<double> gc, gn;
    CosineWithin(fc, fn, &gc, &gn);
    for (int d = 0; d < p; ++d) {
      size_t di = static_cast<size_t>(d);
      double fd_c = CentralDiff(
          [&](double x) {
            std::vector<double> probe = fc;
            probe[di] = x;
            return CosineWithin(probe, fn);
          },
          fc[di], 1e-6);
      double fd_n = CentralDiff(
          [&](double x) {
            std::vector<double> probe = fn;
            probe[di] = x;
            return CosineWithin(fc, probe);
          },
          fn[di], 1e-6);
      losses = std::max({losses, RelErr(gc[di], fd_c), RelErr(gn[di], fd_n)});
    }
  }

  double secs = Seconds(t0);
  bool pass = layers < 1e-4 && losses < 1e-4 && mse < 1e-8 && secs < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "gradient checks: max rel err layers %.2e, losses %.2e, "
                "mse %.2e (gates 1e-4, 1e-4, 1e-8), %.1f s (< 60 s)",
                layers, losses, mse, secs);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// Criterion 2: requested mixing SNR is recovered exactly from the residual.

Outcome Criterion2() {
  RandomStream rng(202);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    size_t len = 2000 + rng.UniformInt(4000);
    Waveform clean;
    clean.samples.resize(len);
    for (auto &x : clean.samples) x = 0.1 * rng.Normal();
    Waveform noise;
    noise.samples.resize(len + rng.UniformInt(3000));
    for (auto &x : noise.samples) x = 0.2 * rng.Normal();
    double snr = rng.Uniform(-5.0, 25.0);

    Waveform fitted = FitNoiseTo(noise, len, &rng);
    Waveform mixed = MixAtSnrFitted(clean, fitted, snr);
    Waveform added;
    added.sample_rate = clean.sample_rate;
    added.samples.resize(len);
    for (size_t i = 0; i < len; ++i)
      added.samples[i] = mixed.samples[i] - clean.samples[i];
    double measured = 10.0 * std::log10(RmsPower(clean) / RmsPower(added));
    worst = std::max(worst, std::abs(measured - snr));
  }
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "1000 random triples, snr in [-5, 25]: max |measured - "
                "requested| = %.3e dB (< 1e-6 dB)",
                worst);
  return {worst < 1e-6, buf};
}

// ---------------------------------------------------------------------------
// Criterion 3: scorer matches an exhaustive threshold-enumeration oracle.

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
  Require(false, "OracleEer: no crossing found");
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

Outcome Criterion3() {
  RandomStream rng(303);
  const int kInstances = 400;
  int oracle_bad = 0, invar_bad = 0;
  for (int t = 0; t < kInstances; ++t) {
    ScoreSet s = RandomInstance(&rng);
    double eer = ComputeEer(s).eer;
    double dcf1 = ComputeMinDcf(s, 0.01);
    double dcf2 = ComputeMinDcf(s, 0.001);
    if (eer != OracleEer(s)) ++oracle_bad;
    if (dcf1 != OracleMinDcf(s, 0.01)) ++oracle_bad;
    if (dcf2 != OracleMinDcf(s, 0.001)) ++oracle_bad;

    // Strictly increasing transforms: affine and odd cubic.
    ScoreSet affine = s, cubic = s;
    for (auto *v : {&affine.target, &affine.nontarget})
      for (auto &x : *v) x = 2.0 * x + 3.0;
    for (auto *v : {&cubic.target, &cubic.nontarget})
      for (auto &x : *v) x = x * x * x;
    for (const ScoreSet *m : {&affine, &cubic}) {
      if (ComputeEer(*m).eer != eer) ++invar_bad;
      if (ComputeMinDcf(*m, 0.01) != dcf1) ++invar_bad;
      if (ComputeMinDcf(*m, 0.001) != dcf2) ++invar_bad;
    }
  }

  ScoreSet flat;
  flat.target = {0.5, 0.5, 0.5};
  flat.nontarget = {0.5, 0.5};
  bool flat_ok =
      ComputeMinDcf(flat, 0.01) == 1.0 && ComputeMinDcf(flat, 0.001) == 1.0;

  bool pass = oracle_bad == 0 && invar_bad == 0 && flat_ok;
  char buf[224];
  std::snprintf(buf, sizeof(buf),
                "%d instances: %d oracle mismatches, %d transform-invariance "
                "mismatches (exact ==), all-equal-scores minDCF %s 1.0",
                kInstances, oracle_bad, invar_bad, flat_ok ? "==" : "!=");
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// Shared desk-scale corpus for criteria 4 and 5.

struct DeskFixture {
  std::string corpus_dir;
  CorpusManifest manifest;
  TrialSet trials;
};

const DeskFixture &Desk() {
  static DeskFixture fx = [] {
    Note("building desk corpus (12 speakers x 20 utterances)");
    DeskFixture f;
    f.corpus_dir = RootDir() + "/corpus";
    CorpusConfig cfg;  // desk defaults, seed 7
    f.manifest = BuildCorpus(cfg, f.corpus_dir);
    f.trials = BuildTrials(f.manifest, 72, 720, 7);
    return f;
  }();
  return fx;
}

// ---------------------------------------------------------------------------
// Criterion 4: augmentation policy statistics and provenance diversity.

Outcome Criterion4() {
  const DeskFixture &fx = Desk();
  AugmentPolicy policy;  // defaults: snr uniform on [0, 20], equal type weights
  RandomStream rng(404);

  const int kDraws = 100000;
  double sum = 0.0, lo = 1e9, hi = -1e9;
  int babble_draws = 0, babble_bad = 0;
  for (int i = 0; i < kDraws; ++i) {
    AugmentDraw d = DrawAugmentation(policy, fx.manifest, "train", &rng);
    sum += d.snr_db;
    lo = std::min(lo, d.snr_db);
    hi = std::max(hi, d.snr_db);
    if (d.type == NoiseType::kBabble) {
      ++babble_draws;
      std::set<std::string> uniq(d.noise_ids.begin(), d.noise_ids.end());
      bool ok = d.babble_k >= 3 && d.babble_k <= 6 &&
                static_cast<int>(d.noise_ids.size()) == d.babble_k &&
                uniq.size() == d.noise_ids.size();
      if (!ok) ++babble_bad;
    }
  }
  double mean = sum / kDraws;

  // Provenance diversity: 10 utterances across 100 simulated epochs.
  std::vector<std::string> train_utts;
  for (const UttEntry &u : fx.manifest.utterances)
    if (u.split == "train" && static_cast<int>(train_utts.size()) < 10)
      train_utts.push_back(u.utt_id);
  Require(train_utts.size() == 10, "expected at least 10 train utterances");

  TrainConfig tcfg;
  PairMaker maker(fx.manifest, tcfg.fbank, policy, 7);
  std::set<std::string> tuples;
  int total = 0;
  for (const std::string &utt : train_utts) {
    for (int epoch = 0; epoch < 100; ++epoch) {
      PairSample p = maker.MakePair(utt, epoch, 0);
      char key[256];
      std::string ids;
      for (const std::string &id : p.provenance.noise_ids) ids += id + ",";
      std::snprintf(key, sizeof(key), "%s|%d|%s|%.17g|%zu", utt.c_str(),
                    static_cast<int>(p.provenance.noise_type), ids.c_str(),
                    p.provenance.snr_db, p.provenance.fit_offset);
      tuples.insert(key);
      ++total;
    }
  }
  double distinct = static_cast<double>(tuples.size()) / total;

  bool pass = mean >= 9.8 && mean <= 10.2 && lo >= 0.0 && hi <= 20.0 &&
              babble_draws > 0 && babble_bad == 0 && distinct >= 0.99;
  char buf[288];
  std::snprintf(buf, sizeof(buf),
                "1e5 draws: snr mean %.3f dB (10 +- 0.2), range [%.3f, %.3f] "
                "(within [0, 20]); %d babble draws, %d outside 3-6 distinct "
                "sources; provenance tuples %.1f%% distinct over 100 epochs "
                "(>= 99%%)",
                mean, lo, hi, babble_draws, babble_bad, 100.0 * distinct);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// Criterion 5: directional experiment across three seeds.

struct TrainedSystem {
  double pooled_eer = 0.0;
  std::string checkpoint;
};

TrainedSystem TrainAndEval(const TrainConfig &cfg, const std::string &name) {
  const DeskFixture &fx = Desk();
  std::string run_dir = RootDir() + "/" + name;
  char msg[128];
  std::snprintf(msg, sizeof(msg), "training %s (15 epochs)", name.c_str());
  Note(msg);
  RunTraining(cfg, fx.manifest, run_dir);

  TrainedSystem sys;
  sys.checkpoint = run_dir + "/checkpoint.bin";
  EmbedNet<float> net = LoadCheckpoint(sys.checkpoint);
  PairMaker maker(fx.manifest, cfg.fbank, cfg.policy, cfg.seed);
  std::snprintf(msg, sizeof(msg), "evaluating %s", name.c_str());
  Note(msg);
  std::vector<ConditionResult> rows = EvaluateConditions(
      maker, &net, fx.trials, {0, 5, 10, 15, 20}, run_dir + "/eval");
  Require(!rows.empty() && rows.back().label == "all",
          "expected pooled row last");
  sys.pooled_eer = rows.back().eer;
  return sys;
}

Outcome Criterion5() {
  const DeskFixture &fx = Desk();
  const std::vector<uint64_t> seeds = {1, 2, 3};

  std::vector<double> eer_clean, eer_online, eer_dual;
  std::vector<double> mse_ratio;
  PairMaker ref_maker(fx.manifest, TrainConfig().fbank, TrainConfig().policy,
                      123);
  std::vector<PairSample> pairs = BuildPairedEvalSet(ref_maker, 7);

  for (uint64_t seed : seeds) {
    TrainConfig base;  // desk defaults: 15 epochs, batch 16, lr 0.1
    base.seed = seed;

    TrainConfig clean_cfg = base;
    clean_cfg.mode = AugMode::kClean;
    clean_cfg.within = WithinLoss::kNone;
    TrainConfig online_cfg = base;
    online_cfg.mode = AugMode::kOnline;
    online_cfg.within = WithinLoss::kNone;
    TrainConfig dual_cfg = base;
    dual_cfg.mode = AugMode::kOnline;
    dual_cfg.within = WithinLoss::kMse;
    dual_cfg.alpha = 1.0;

    std::string tag = "c5_seed" + std::to_string(seed);
    TrainedSystem clean_sys = TrainAndEval(clean_cfg, tag + "_clean");
    TrainedSystem online_sys = TrainAndEval(online_cfg, tag + "_online");
    TrainedSystem dual_sys = TrainAndEval(dual_cfg, tag + "_dual");

    eer_clean.push_back(clean_sys.pooled_eer);
    eer_online.push_back(online_sys.pooled_eer);
    eer_dual.push_back(dual_sys.pooled_eer);

    EmbedNet<float> online_net = LoadCheckpoint(online_sys.checkpoint);
    EmbedNet<float> dual_net = LoadCheckpoint(dual_sys.checkpoint);
    double online_mse = ReferenceMse(&online_net, pairs);
    double dual_mse = ReferenceMse(&dual_net, pairs);
    Require(online_mse > 0.0, "reference within-sample MSE must be positive");
    mse_ratio.push_back(dual_mse / online_mse);
  }

  int a_wins = 0, b_wins = 0, c_wins = 0;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (eer_online[i] < eer_clean[i]) ++a_wins;
    if (eer_dual[i] < eer_online[i]) ++b_wins;
    if (mse_ratio[i] < 0.5) ++c_wins;
  }
  bool pass = a_wins == 3 && b_wins >= 2 && c_wins == 3;
  char buf[384];
  std::snprintf(
      buf, sizeof(buf),
      "pooled-noise EER%% clean/online/dual: seed1 %.2f/%.2f/%.2f, seed2 "
      "%.2f/%.2f/%.2f, seed3 %.2f/%.2f/%.2f; online<clean %d/3 (need 3), "
      "dual<online %d/3 (need >= 2), paired-MSE ratio %.3f/%.3f/%.3f (< 0.5)",
      100 * eer_clean[0], 100 * eer_online[0], 100 * eer_dual[0],
      100 * eer_clean[1], 100 * eer_online[1], 100 * eer_dual[1],
      100 * eer_clean[2], 100 * eer_online[2], 100 * eer_dual[2], a_wins,
      b_wins, mse_ratio[0], mse_ratio[1], mse_ratio[2]);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// Criterion 6: end-to-end determinism, plus the desk-scale smoke budget.

// One full pipeline: synth corpus, 2-epoch dual-loss training, full-grid
// evaluation.  Returns the run directory.
std::string RunPipeline(const std::string &name) {
  std::string dir = RootDir() + "/" + name;
  Note("pipeline " + name + ": corpus");
  CorpusConfig ccfg;  // seed 7
  CorpusManifest manifest = BuildCorpus(ccfg, dir + "/corpus");
  TrialSet trials = BuildTrials(manifest, 72, 720, 7);
  WriteTrials(trials, dir + "/corpus/trials.txt");

  Note("pipeline " + name + ": train");
  TrainConfig tcfg;
  tcfg.mode = AugMode::kOnline;
  tcfg.within = WithinLoss::kMse;
  tcfg.alpha = 1.0;
  tcfg.epochs = 2;
  tcfg.seed = 4;
  RunTraining(tcfg, manifest, dir + "/run");

  Note("pipeline " + name + ": eval");
  EmbedNet<float> net = LoadCheckpoint(dir + "/run/checkpoint.bin");
  PairMaker maker(manifest, tcfg.fbank, tcfg.policy, tcfg.seed);
  EvaluateConditions(maker, &net, trials, {0, 5, 10, 15, 20},
                     dir + "/run/eval");
  return dir;
}

Outcome Criterion6() {
  auto t0 = std::chrono::steady_clock::now();
  std::string a = RunPipeline("c6_run_a");
  double first_pipeline_s = Seconds(t0);

  // Exercise the report arithmetic as part of the smoke budget.  The
  // command prints its table to stdout; capture it so this binary's output
  // stays one line per criterion.
  ReportOptions ropt;
  ropt.run_dirs = {a + "/run"};
  ropt.out_path = a + "/report.txt";
  {
    std::ostringstream captured;
    std::streambuf *keep = std::cout.rdbuf(captured.rdbuf());
    int rc = CmdReport(ropt);
    std::cout.rdbuf(keep);
    Require(rc == 0, "report command failed");
    Require(!captured.str().empty(), "report printed nothing");
  }
  double smoke_s = Seconds(t0);

  std::string b = RunPipeline("c6_run_b");

  // Every comparison target must exist and match byte for byte.
  std::vector<std::string> rel = {
      "/corpus/trials.txt", "/run/checkpoint.bin", "/run/provenance.jsonl",
      "/run/eval/metrics.csv", "/run/eval/det.csv"};
  for (const auto &entry : fs::directory_iterator(a + "/run/eval")) {
    std::string name = entry.path().filename().string();
    if (name.rfind("scores_", 0) == 0) rel.push_back("/run/eval/" + name);
  }
  std::sort(rel.begin(), rel.end());
  int mismatches = 0;
  std::string first_bad;
  for (const std::string &r : rel) {
    if (ReadBytes(a + r) != ReadBytes(b + r)) {
      ++mismatches;
      if (first_bad.empty()) first_bad = r;
    }
  }

  bool pass = mismatches == 0 && smoke_s < 600.0;
  char buf[288];
  if (mismatches == 0) {
    std::snprintf(buf, sizeof(buf),
                  "two pipelines, %zu artifacts bit-identical (checkpoint, "
                  "provenance, scores, metric CSVs); smoke "
                  "corpus+train+eval+report %.0f s (< 600 s)",
                  rel.size(), smoke_s);
  } else {
    std::snprintf(buf, sizeof(buf),
                  "%d of %zu artifacts differ between identical runs (first: "
                  "%s); pipeline %.0f s",
                  mismatches, rel.size(), first_bad.c_str(), first_pipeline_s);
  }
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// Criterion 7: published-profile architecture shapes.

Outcome Criterion7() {
  NetConfig cfg = NetConfig::FullProfile();
  int bad = 0;
  for (int L : {98, 200, 301}) {
    std::vector<StageShape> trace = ShapeTrace(cfg, L);
    Require(trace.size() == 8, "expected an eight-stage trace");
    auto ceil_div = [](int x, int d) { return (x + d - 1) / d; };
    struct Want {
      const char *name;
      int c, h, w;
    };
    std::vector<Want> want = {
        {"conv1", 16, 64, L},
        {"res1", 16, 64, L},
        {"res2", 32, 32, ceil_div(L, 2)},
        {"res3", 64, 16, ceil_div(L, 4)},
        {"res4", 128, 8, ceil_div(L, 8)},
        {"encoding", 256, 1, 1},
        {"embedding", 128, 1, 1},
        {"classifier", 1211, 1, 1},
    };
    for (size_t i = 0; i < want.size(); ++i) {
      if (trace[i].name != want[i].name || trace[i].c != want[i].c ||
          trace[i].h != want[i].h || trace[i].w != want[i].w)
        ++bad;
    }
  }

  // The instantiated network produces the same dimensions.
  EmbedNet<float> net(cfg, 1);
  Tensor<float> input(1, 1, 64, 98);
  RandomStream rng(2);
  for (auto &x : input.v) x = static_cast<float>(rng.Normal());
  Tensor<float> emb = net.ForwardEmbed(input, Mode::kEval);
  RandomStream drop(3);
  Tensor<float> logits = net.ClassifierForward(emb, Mode::kEval, &drop);
  bool inst_ok = emb.c == 128 && logits.c == 1211;

  bool pass = bad == 0 && inst_ok;
  char buf[224];
  std::snprintf(buf, sizeof(buf),
                "full profile: %d stage-shape mismatches over L in {98, 200, "
                "301}; instantiated net emits encoding 256, embedding %d, "
                "classifier %d",
                bad, emb.c, logits.c);
  return {pass, buf};
}

}  // namespace

int main() {
  SetNumThreads(1);
  std::vector<std::function<Outcome()>> criteria = {
      Criterion1, Criterion2, Criterion3, Criterion4,
      Criterion5, Criterion6, Criterion7};
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  if (failures > 0)
    std::printf("acceptance: %d of 7 criteria FAILED\n", failures);
  else
    std::printf("acceptance: all 7 criteria passed\n");
  return failures == 0 ? 0 : 1;
}
