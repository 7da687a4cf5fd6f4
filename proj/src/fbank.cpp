// fbank.cpp
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

#include "vivet/fbank.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vivet/common.hpp"

namespace vivet {

namespace {

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr char kFeatMagic[8] = {'V', 'I', 'V', 'F', 'E', 'A', 'T', '1'};

}  // namespace

void FbankConfig::Validate() const {
  Require(sample_rate > 0, "FbankConfig: sample_rate must be positive");
  Require(win_length > 0 && hop_length > 0, "FbankConfig: window/hop must be positive");
  Require(win_length <= n_fft, "FbankConfig: win_length must not exceed n_fft");
  Require(IsPowerOfTwo(n_fft), "FbankConfig: n_fft must be a power of two");
  Require(n_mels >= 1, "FbankConfig: n_mels must be >= 1");
  Require(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0,
          "FbankConfig: need 0 <= fmin < fmax <= sample_rate/2");
  Require(log_floor > 0.0, "FbankConfig: log_floor must be positive");
}

int FrameCount(size_t n_samples, const FbankConfig &cfg) {
  Require(n_samples >= static_cast<size_t>(cfg.win_length),
          "FrameCount: utterance shorter than one window");
  return static_cast<int>((n_samples - cfg.win_length) / cfg.hop_length) + 1;
}

void Fft(std::vector<std::complex<double>> *x, bool inverse) {
  size_t n = x->size();
  Require(IsPowerOfTwo(static_cast<int>(n)), "Fft: length must be a power of two");
  auto &a = *x;

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto &c : a) c /= static_cast<double>(n);
  }
}

std::vector<double> MelFilterbank(const FbankConfig &cfg) {
  cfg.Validate();
  int n_bins = cfg.n_fft / 2 + 1;
  std::vector<double> bank(static_cast<size_t>(cfg.n_mels) * n_bins, 0.0);

  double mel_lo = HzToMel(cfg.fmin);
  double mel_hi = HzToMel(cfg.fmax);
  // n_mels + 2 breakpoints, equally spaced on the mel scale.
  std::vector<double> edges_hz(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    double mel = mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1);
    edges_hz[i] = MelToHz(mel);
  }

  double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
  for (int m = 0; m < cfg.n_mels; ++m) {
    double lo = edges_hz[m], center = edges_hz[m + 1], hi = edges_hz[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f < center) {
        w = (f - lo) / (center - lo);
      } else if (f >= center && f < hi) {
        w = (hi - f) / (hi - center);
      }
      bank[static_cast<size_t>(m) * n_bins + k] = w;
    }
  }
  return bank;
}

FeatureMatrix LogMel(const Waveform &w, const FbankConfig &cfg) {
  cfg.Validate();
  Require(w.sample_rate == cfg.sample_rate,
          "LogMel: waveform sample rate does not match config");
  int frames = FrameCount(w.samples.size(), cfg);
  int n_bins = cfg.n_fft / 2 + 1;
  std::vector<double> bank = MelFilterbank(cfg);

  std::vector<double> window(cfg.win_length);
  for (int i = 0; i < cfg.win_length; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (cfg.win_length - 1));

  FeatureMatrix fm;
  fm.frames = frames;
  fm.n_mels = cfg.n_mels;
  fm.frame_shift_s = static_cast<double>(cfg.hop_length) / cfg.sample_rate;
  fm.values.resize(static_cast<size_t>(frames) * cfg.n_mels);

  std::vector<std::complex<double>> buf(cfg.n_fft);
  std::vector<double> power(n_bins);
  for (int t = 0; t < frames; ++t) {
    size_t start = static_cast<size_t>(t) * cfg.hop_length;
    for (int i = 0; i < cfg.win_length; ++i)
      buf[i] = w.samples[start + i] * window[i];
    for (int i = cfg.win_length; i < cfg.n_fft; ++i) buf[i] = 0.0;
    Fft(&buf, false);
    for (int k = 0; k < n_bins; ++k) power[k] = std::norm(buf[k]);

    for (int m = 0; m < cfg.n_mels; ++m) {
      const double *row = bank.data() + static_cast<size_t>(m) * n_bins;
      double e = 0.0;
      for (int k = 0; k < n_bins; ++k) e += row[k] * power[k];
      fm.At(t, m) = std::log(e + cfg.log_floor);
    }
  }

  if (cfg.mean_normalize) {
    for (int m = 0; m < cfg.n_mels; ++m) {
      double mean = 0.0;
      for (int t = 0; t < frames; ++t) mean += fm.At(t, m);
      mean /= frames;
      for (int t = 0; t < frames; ++t) fm.At(t, m) -= mean;
    }
  }

  for (double v : fm.values)
    Require(std::isfinite(v), "LogMel: non-finite feature value");
  return fm;
}

void WriteFeatureFile(const FeatureMatrix &fm, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), "WriteFeatureFile: cannot open " + path);
  out.write(kFeatMagic, 8);
  uint32_t frames = static_cast<uint32_t>(fm.frames);
  uint32_t n_mels = static_cast<uint32_t>(fm.n_mels);
  out.write(reinterpret_cast<const char *>(&frames), 4);
  out.write(reinterpret_cast<const char *>(&n_mels), 4);
  out.write(reinterpret_cast<const char *>(&fm.frame_shift_s), 8);
  std::vector<float> row(fm.values.size());
  for (size_t i = 0; i < fm.values.size(); ++i)
    row[i] = static_cast<float>(fm.values[i]);
  out.write(reinterpret_cast<const char *>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
  Require(out.good(), "WriteFeatureFile: write failed: " + path);
}

FeatureMatrix ReadFeatureFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), "ReadFeatureFile: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  Require(in.good() && std::memcmp(magic, kFeatMagic, 8) == 0,
          "ReadFeatureFile: bad magic in " + path);
  uint32_t frames = 0, n_mels = 0;
  double frame_shift_s = 0.0;
  in.read(reinterpret_cast<char *>(&frames), 4);
  in.read(reinterpret_cast<char *>(&n_mels), 4);
  in.read(reinterpret_cast<char *>(&frame_shift_s), 8);
  Require(in.good() && frames > 0 && n_mels > 0 && frame_shift_s > 0.0,
          "ReadFeatureFile: bad header in " + path);
  FeatureMatrix fm;
  fm.frames = static_cast<int>(frames);
  fm.n_mels = static_cast<int>(n_mels);
  fm.frame_shift_s = frame_shift_s;
  std::vector<float> row(static_cast<size_t>(frames) * n_mels);
  in.read(reinterpret_cast<char *>(row.data()),
          static_cast<std::streamsize>(row.size() * sizeof(float)));
  Require(in.good(), "ReadFeatureFile: truncated payload in " + path);
  fm.values.assign(row.begin(), row.end());
  return fm;
}

}  // namespace vivet
