// wav.cpp
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

#include "vivet/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "vivet/common.hpp"

namespace vivet {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<unsigned char> *buf, uint32_t v) {
  buf->push_back(v & 0xff);
  buf->push_back((v >> 8) & 0xff);
  buf->push_back((v >> 16) & 0xff);
  buf->push_back((v >> 24) & 0xff);
}

void PutU16(std::vector<unsigned char> *buf, uint16_t v) {
  buf->push_back(v & 0xff);
  buf->push_back((v >> 8) & 0xff);
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

}  // namespace

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), "ReadWav: cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Require(data.size() >= 44, "ReadWav: file too short for a WAV header: " + path);
  Require(std::memcmp(data.data(), "RIFF", 4) == 0 &&
              std::memcmp(data.data() + 8, "WAVE", 4) == 0,
          "ReadWav: not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const unsigned char *payload = nullptr;
  uint32_t payload_bytes = 0;

  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char *chunk = data.data() + pos;
    uint32_t chunk_size = ReadU32(chunk + 4);
    size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      Require(chunk_size >= 16 && body + 16 <= data.size(),
              "ReadWav: malformed fmt chunk: " + path);
      format = ReadU16(data.data() + body);
      channels = ReadU16(data.data() + body + 2);
      sample_rate = ReadU32(data.data() + body + 4);
      bits = ReadU16(data.data() + body + 14);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      Require(body + chunk_size <= data.size(),
              "ReadWav: data chunk overruns file: " + path);
      payload = data.data() + body;
      payload_bytes = chunk_size;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  Require(payload != nullptr, "ReadWav: no data chunk: " + path);
  Require(channels >= 1, "ReadWav: zero channels: " + path);
  Require(sample_rate > 0, "ReadWav: zero sample rate: " + path);

  bool pcm16 = (format == kFormatPcm && bits == 16);
  bool float32 = (format == kFormatIeeeFloat && bits == 32);
  Require(pcm16 || float32,
          "ReadWav: unsupported codec (need PCM16 or float32): " + path);

  size_t bytes_per_sample = pcm16 ? 2 : 4;
  size_t frame_bytes = bytes_per_sample * channels;
  size_t n_frames = payload_bytes / frame_bytes;
  Require(n_frames > 0, "ReadWav: zero-length payload: " + path);

  Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  w.samples.resize(n_frames);
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const unsigned char *sp = payload + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        int16_t s = static_cast<int16_t>(ReadU16(sp));
        acc += static_cast<double>(s) / 32768.0;
      } else {
        float f;
        std::memcpy(&f, sp, 4);
        acc += static_cast<double>(f);
      }
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

WavWriteStats WriteWav(const Waveform &w, const std::string &path) {
  Require(!w.samples.empty(), "WriteWav: empty waveform");
  Require(w.sample_rate > 0, "WriteWav: invalid sample rate");

  WavWriteStats stats;
  uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  std::vector<unsigned char> buf;
  buf.reserve(44 + data_bytes);

  buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
  PutU32(&buf, 36 + data_bytes);
  buf.insert(buf.end(), {'W', 'A', 'V', 'E'});
  buf.insert(buf.end(), {'f', 'm', 't', ' '});
  PutU32(&buf, 16);
  PutU16(&buf, kFormatPcm);
  PutU16(&buf, 1);  // mono
  PutU32(&buf, static_cast<uint32_t>(w.sample_rate));
  PutU32(&buf, static_cast<uint32_t>(w.sample_rate) * 2);  // byte rate
  PutU16(&buf, 2);                                         // block align
  PutU16(&buf, 16);                                        // bits
  buf.insert(buf.end(), {'d', 'a', 't', 'a'});
  PutU32(&buf, data_bytes);

  for (double s : w.samples) {
    Require(std::isfinite(s), "WriteWav: non-finite sample");
    if (s > 1.0 || s < -1.0) ++stats.clipped_samples;
    double q = std::lround(s * 32768.0);
    if (q > 32767.0) q = 32767.0;
    if (q < -32768.0) q = -32768.0;
    PutU16(&buf, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), "WriteWav: cannot open for writing: " + path);
  out.write(reinterpret_cast<const char *>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  Require(out.good(), "WriteWav: write failed: " + path);
  return stats;
}

}  // namespace vivet
