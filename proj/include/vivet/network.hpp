// vivet/network.hpp
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

#ifndef VIVET_NETWORK_HPP_
#define VIVET_NETWORK_HPP_

#include <array>
#include <string>
#include <vector>

#include "vivet/fbank.hpp"
#include "vivet/layers.hpp"
#include "vivet/tensor.hpp"

namespace vivet {

enum class HeadType { kSoftmax, kASoftmax };

const char *HeadTypeName(HeadType h);
HeadType HeadTypeFromName(const std::string &name);

struct NetConfig {
  std::array<int, 4> stage_channels = {4, 8, 16, 32};
  std::array<int, 4> stage_blocks = {1, 1, 1, 1};
  int n_mels = 64;
  int embedding_dim = 32;
  int n_classes = 12;
  double dropout_p = 0.5;
  HeadType head = HeadType::kSoftmax;
  int a_softmax_margin = 4;

  void Validate() const;

  // Channels [16,32,64,128], blocks [3,4,6,3], embedding 128, classes 1211:
  // the full-size profile.  The defaults above are the down-scaled profile
  // the toolkit trains in minutes on one core.
  static NetConfig FullProfile();
};

struct StageShape {
  std::string name;
  int c = 0, h = 0, w = 0;
};

// Output shape after each stage for an input of width `frames` (height is
// n_mels).  Purely arithmetic; no tensors are allocated.
std::vector<StageShape> ShapeTrace(const NetConfig &cfg, int frames);

// Residual embedding network: conv stem, four residual stages (stages 2-4
// downsample by 2), global statistics pooling, then a fully-connected layer
// whose output is the embedding.  The classifier on top is a plain affine
// layer for the softmax head or a bias-free weight matrix with unit-norm
// class rows for the angular-margin head.
template <typename T>
class EmbedNet {
 public:
  EmbedNet(const NetConfig &cfg, uint64_t init_seed) : cfg_(cfg) {
    cfg_.Validate();
    RandomStream rng(MixSeed({init_seed, Fnv1a("init")}));
    stem_conv_ = Conv2d<T>(&store_, "stem.conv", 1, cfg.stage_channels[0], 3, 1,
                           1, &rng);
    stem_bn_ = BatchNorm2d<T>(&store_, "stem.bn", cfg.stage_channels[0]);
    int cin = cfg.stage_channels[0];
    for (int s = 0; s < 4; ++s) {
      int cout = cfg.stage_channels[static_cast<size_t>(s)];
      for (int b = 0; b < cfg.stage_blocks[static_cast<size_t>(s)]; ++b) {
        int stride = (s > 0 && b == 0) ? 2 : 1;
        std::string name = "stage" + ToString(s + 1) + ".block" + ToString(b);
        blocks_.emplace_back(&store_, name, cin, cout, stride, &rng);
        cin = cout;
      }
    }
    encode_ = Linear<T>(&store_, "encode", 2 * cfg.stage_channels[3],
                        cfg.embedding_dim, true, &rng);
    dropout_ = Dropout<T>(cfg.dropout_p);
    bool bias = (cfg.head == HeadType::kSoftmax);
    classifier_ = Linear<T>(&store_, "classifier", cfg.embedding_dim,
                            cfg.n_classes, bias, &rng);
    if (cfg.head == HeadType::kASoftmax) NormalizeClassifierRows();
  }

  EmbedNet(const EmbedNet &) = delete;
  EmbedNet &operator=(const EmbedNet &) = delete;
  EmbedNet(EmbedNet &&) = default;
  EmbedNet &operator=(EmbedNet &&) = default;

  const NetConfig &Config() const { return cfg_; }
  ParamStore<T> &Store() { return store_; }
  const ParamStore<T> &Store() const { return store_; }

  // Input [N, 1, n_mels, frames] -> embedding [N, embedding_dim, 1, 1].
  Tensor<T> ForwardEmbed(const Tensor<T> &input, Mode mode) {
    Require(input.c == 1 && input.h == cfg_.n_mels,
            "EmbedNet: input must be [N, 1, n_mels, frames]");
    Tensor<T> a, b;
    stem_conv_.Forward(&store_, input, &a);
    stem_bn_.Forward(&store_, a, mode, &b);
    stem_relu_.Forward(b, &a);
    for (auto &block : blocks_) {
      block.Forward(&store_, a, mode, &b);
      std::swap(a, b);
    }
    gsp_.Forward(a, &b);
    Tensor<T> emb;
    encode_.Forward(&store_, b, &emb);
    Require(emb.AllFinite(), "EmbedNet: non-finite embedding");
    return emb;
  }

  // Accumulates parameter gradients for the most recent train-mode forward.
  void BackwardFromEmbedding(const Tensor<T> &grad_emb) {
    Tensor<T> a, b;
    encode_.Backward(&store_, grad_emb, &a);
    gsp_.Backward(a, &b);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
      it->Backward(&store_, b, &a);
      std::swap(a, b);
    }
    stem_relu_.Backward(b, &a);
    stem_bn_.Backward(&store_, a, &b);
    stem_conv_.Backward(&store_, b, &a);
  }

  // Softmax head: logits = W * dropout(f) + b (dropout active in train mode
  // only).  Angular head: logits = W * f with unit-norm rows, giving
  // ||f|| cos(theta_j); the margin enters through the loss, not here.
  Tensor<T> ClassifierForward(const Tensor<T> &emb, Mode mode,
                              RandomStream *dropout_rng) {
    Tensor<T> logits;
    if (cfg_.head == HeadType::kSoftmax) {
      Tensor<T> dropped;
      dropout_.Forward(emb, mode, dropout_rng, &dropped);
      classifier_.Forward(&store_, dropped, &logits);
    } else {
      classifier_.Forward(&store_, emb, &logits);
    }
    Require(logits.AllFinite(), "EmbedNet: non-finite logits");
    return logits;
  }

  // Softmax head only; the angular-margin loss differentiates its own logits.
  void ClassifierBackward(const Tensor<T> &grad_logits, Tensor<T> *grad_emb) {
    Require(cfg_.head == HeadType::kSoftmax,
            "ClassifierBackward: only the softmax head backpropagates here");
    Tensor<T> gdrop;
    classifier_.Backward(&store_, grad_logits, &gdrop);
    dropout_.Backward(gdrop, grad_emb);
  }

  Param<T> &ClassifierWeight() {
    return store_.At(classifier_.WeightIndex());
  }

  // Rescales every class row of the angular head to unit norm.  Called by
  // the trainer after each optimizer application; not differentiated.
  void NormalizeClassifierRows() {
    Require(cfg_.head == HeadType::kASoftmax,
            "NormalizeClassifierRows: angular head only");
    Tensor<T> &w = ClassifierWeight().t;
    for (int j = 0; j < cfg_.n_classes; ++j) {
      double norm = 0.0;
      for (int i = 0; i < cfg_.embedding_dim; ++i) {
        double x = static_cast<double>(w.v[static_cast<size_t>(j) * cfg_.embedding_dim + i]);
        norm += x * x;
      }
      norm = std::sqrt(norm);
      Require(norm > 0.0, "NormalizeClassifierRows: zero-norm class row");
      for (int i = 0; i < cfg_.embedding_dim; ++i)
        w.v[static_cast<size_t>(j) * cfg_.embedding_dim + i] =
            static_cast<T>(w.v[static_cast<size_t>(j) * cfg_.embedding_dim + i] / norm);
    }
  }

 private:
  NetConfig cfg_;
  ParamStore<T> store_;
  Conv2d<T> stem_conv_;
  BatchNorm2d<T> stem_bn_;
  Relu<T> stem_relu_;
  std::vector<ResidualBlock<T>> blocks_;
  Gsp<T> gsp_;
  Linear<T> encode_;
  Dropout<T> dropout_ = Dropout<T>(0.0);
  Linear<T> classifier_;
};

// [frames, n_mels] feature matrices -> [N, 1, n_mels, frames] input tensor.
// All matrices must share the same shape (crop beforehand if they differ).
template <typename T>
Tensor<T> FeaturesToInput(const std::vector<const FeatureMatrix *> &batch) {
  Require(!batch.empty(), "FeaturesToInput: empty batch");
  int frames = batch[0]->frames;
  int mels = batch[0]->n_mels;
  Tensor<T> input(static_cast<int>(batch.size()), 1, mels, frames);
  for (size_t n = 0; n < batch.size(); ++n) {
    Require(batch[n]->frames == frames && batch[n]->n_mels == mels,
            "FeaturesToInput: ragged batch");
    for (int m = 0; m < mels; ++m)
      for (int t = 0; t < frames; ++t)
        input.At(static_cast<int>(n), 0, m, t) =
            static_cast<T>(batch[n]->At(t, m));
  }
  return input;
}

// Versioned binary checkpoint: header, config echo, then named float32 blobs
// for every parameter including batch-norm running statistics.
void SaveCheckpoint(const EmbedNet<float> &net, const std::string &path);
EmbedNet<float> LoadCheckpoint(const std::string &path);

}  // namespace vivet

#endif  // VIVET_NETWORK_HPP_
