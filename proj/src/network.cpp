// network.cpp
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

#include "vivet/network.hpp"

#include <cstring>
#include <fstream>

namespace vivet {

namespace {

constexpr char kCheckpointMagic[8] = {'V', 'I', 'V', 'N', 'E', 'T', '0', '1'};

template <typename T>
void WriteRaw(std::ofstream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T ReadRaw(std::ifstream &in) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof(T));
  Require(in.good(), "checkpoint: truncated file");
  return v;
}

}  // namespace

const char *HeadTypeName(HeadType h) {
  return h == HeadType::kSoftmax ? "softmax" : "a-softmax";
}

HeadType HeadTypeFromName(const std::string &name) {
  if (name == "softmax") return HeadType::kSoftmax;
  if (name == "a-softmax" || name == "asoftmax") return HeadType::kASoftmax;
  throw Error("HeadTypeFromName: unknown head '" + name + "'");
}

void NetConfig::Validate() const {
  for (int c : stage_channels) Require(c > 0, "NetConfig: nonpositive channels");
  for (int b : stage_blocks) Require(b > 0, "NetConfig: nonpositive block count");
  Require(n_mels > 0, "NetConfig: nonpositive mel count");
  Require(embedding_dim > 0, "NetConfig: nonpositive embedding dim");
  Require(n_classes > 0, "NetConfig: nonpositive class count");
  Require(dropout_p >= 0.0 && dropout_p < 1.0, "NetConfig: dropout_p out of range");
  Require(a_softmax_margin >= 1 && a_softmax_margin <= 4,
          "NetConfig: angular margin must be in [1, 4]");
  // Three stride-2 stages; each needs a nonvanishing input height.
  Require(n_mels >= 8, "NetConfig: n_mels too small for three downsamplings");
}

NetConfig NetConfig::FullProfile() {
  NetConfig cfg;
  cfg.stage_channels = {16, 32, 64, 128};
  cfg.stage_blocks = {3, 4, 6, 3};
  cfg.n_mels = 64;
  cfg.embedding_dim = 128;
  cfg.n_classes = 1211;
  return cfg;
}

std::vector<StageShape> ShapeTrace(const NetConfig &cfg, int frames) {
  cfg.Validate();
  Require(frames >= 1, "ShapeTrace: nonpositive frame count");
  std::vector<StageShape> trace;
  int h = cfg.n_mels, w = frames;
  trace.push_back({"conv1", cfg.stage_channels[0], h, w});
  for (int s = 0; s < 4; ++s) {
    if (s > 0) {
      h = ConvOutSize(h, 3, 2, 1);
      w = ConvOutSize(w, 3, 2, 1);
    }
    trace.push_back({"res" + ToString(s + 1),
                     cfg.stage_channels[static_cast<size_t>(s)], h, w});
  }
  trace.push_back({"encoding", 2 * cfg.stage_channels[3], 1, 1});
  trace.push_back({"embedding", cfg.embedding_dim, 1, 1});
  trace.push_back({"classifier", cfg.n_classes, 1, 1});
  return trace;
}

void SaveCheckpoint(const EmbedNet<float> &net, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), "SaveCheckpoint: cannot open " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));

  const NetConfig &cfg = net.Config();
  for (int c : cfg.stage_channels) WriteRaw<int32_t>(out, c);
  for (int b : cfg.stage_blocks) WriteRaw<int32_t>(out, b);
  WriteRaw<int32_t>(out, cfg.n_mels);
  WriteRaw<int32_t>(out, cfg.embedding_dim);
  WriteRaw<int32_t>(out, cfg.n_classes);
  WriteRaw<int32_t>(out, cfg.head == HeadType::kSoftmax ? 0 : 1);
  WriteRaw<int32_t>(out, cfg.a_softmax_margin);
  WriteRaw<double>(out, cfg.dropout_p);

  const ParamStore<float> &store = net.Store();
  WriteRaw<uint32_t>(out, static_cast<uint32_t>(store.Count()));
  for (size_t i = 0; i < store.Count(); ++i) {
    const Param<float> &p = store.At(static_cast<int>(i));
    WriteRaw<uint32_t>(out, static_cast<uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    WriteRaw<int32_t>(out, p.t.n);
    WriteRaw<int32_t>(out, p.t.c);
    WriteRaw<int32_t>(out, p.t.h);
    WriteRaw<int32_t>(out, p.t.w);
    out.write(reinterpret_cast<const char *>(p.t.v.data()),
              static_cast<std::streamsize>(p.t.v.size() * sizeof(float)));
  }
  Require(out.good(), "SaveCheckpoint: write failed for " + path);
}

EmbedNet<float> LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), "LoadCheckpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  Require(in.good() && std::memcmp(magic, kCheckpointMagic, 8) == 0,
          "LoadCheckpoint: bad magic in " + path);

  NetConfig cfg;
  for (int i = 0; i < 4; ++i)
    cfg.stage_channels[static_cast<size_t>(i)] = ReadRaw<int32_t>(in);
  for (int i = 0; i < 4; ++i)
    cfg.stage_blocks[static_cast<size_t>(i)] = ReadRaw<int32_t>(in);
  cfg.n_mels = ReadRaw<int32_t>(in);
  cfg.embedding_dim = ReadRaw<int32_t>(in);
  cfg.n_classes = ReadRaw<int32_t>(in);
  cfg.head = ReadRaw<int32_t>(in) == 0 ? HeadType::kSoftmax : HeadType::kASoftmax;
  cfg.a_softmax_margin = ReadRaw<int32_t>(in);
  cfg.dropout_p = ReadRaw<double>(in);

  EmbedNet<float> net(cfg, 0);
  ParamStore<float> &store = net.Store();
  uint32_t count = ReadRaw<uint32_t>(in);
  Require(count == store.Count(),
          "LoadCheckpoint: parameter count mismatch in " + path);
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t len = ReadRaw<uint32_t>(in);
    Require(len < 4096, "LoadCheckpoint: implausible name length");
    std::string name(len, '\0');
    in.read(name.data(), len);
    Param<float> *p = store.Find(name);
    Require(p != nullptr, "LoadCheckpoint: unknown parameter " + name);
    int32_t n = ReadRaw<int32_t>(in), c = ReadRaw<int32_t>(in),
            h = ReadRaw<int32_t>(in), w = ReadRaw<int32_t>(in);
    Require(n == p->t.n && c == p->t.c && h == p->t.h && w == p->t.w,
            "LoadCheckpoint: shape mismatch for " + name);
    in.read(reinterpret_cast<char *>(p->t.v.data()),
            static_cast<std::streamsize>(p->t.v.size() * sizeof(float)));
    Require(in.good(), "LoadCheckpoint: truncated blob for " + name);
  }
  return net;
}

}  // namespace vivet
