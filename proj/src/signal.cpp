// signal.cpp
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

#include "vivet/signal.hpp"

#include <algorithm>
#include <cmath>

namespace vivet {

const char *NoiseTypeName(NoiseType t) {
  switch (t) {
    case NoiseType::kMusic: return "music";
    case NoiseType::kAmbient: return "ambient";
    case NoiseType::kTelevision: return "television";
    case NoiseType::kBabble: return "babble";
  }
  throw Error("NoiseTypeName: invalid noise type");
}

NoiseType NoiseTypeFromName(const std::string &name) {
  if (name == "music") return NoiseType::kMusic;
  if (name == "ambient") return NoiseType::kAmbient;
  if (name == "television") return NoiseType::kTelevision;
  if (name == "babble") return NoiseType::kBabble;
  throw Error("NoiseTypeFromName: unknown noise type '" + name + "'");
}

double RmsPower(const Waveform &w) {
  Require(!w.samples.empty(), "RmsPower: empty waveform");
  double acc = 0.0;
  for (double s : w.samples) acc += s * s;
  return acc / static_cast<double>(w.samples.size());
}

void PeakNormalize(Waveform *w, double peak) {
  double m = 0.0;
  for (double s : w->samples) m = std::max(m, std::fabs(s));
  Require(m > 0.0, "PeakNormalize: silent waveform");
  double g = peak / m;
  for (double &s : w->samples) s *= g;
}

Waveform FitNoiseToAt(const Waveform &noise, size_t target_len, size_t offset) {
  Require(!noise.samples.empty(), "FitNoiseTo: empty noise");
  Require(offset < noise.samples.size(), "FitNoiseTo: offset out of range");
  Waveform out;
  out.sample_rate = noise.sample_rate;
  out.samples.resize(target_len);
  size_t n = noise.samples.size();
  if (target_len <= n - offset) {
    std::copy_n(noise.samples.begin() + static_cast<ptrdiff_t>(offset),
                target_len, out.samples.begin());
  } else {
    for (size_t i = 0; i < target_len; ++i)
      out.samples[i] = noise.samples[(offset + i) % n];
  }
  return out;
}

Waveform FitNoiseTo(const Waveform &noise, size_t target_len, RandomStream *rng) {
  Require(!noise.samples.empty(), "FitNoiseTo: empty noise");
  size_t n = noise.samples.size();
  size_t offset;
  if (n >= target_len) {
    // Random contiguous crop.
    offset = static_cast<size_t>(rng->UniformInt(n - target_len + 1));
  } else {
    // Tile end-to-end from a random phase.
    offset = static_cast<size_t>(rng->UniformInt(n));
  }
  return FitNoiseToAt(noise, target_len, offset);
}

Waveform MixAtSnrFitted(const Waveform &clean, const Waveform &fitted_noise,
                        double snr_db) {
  Require(clean.samples.size() == fitted_noise.samples.size(),
          "MixAtSnr: fitted noise length mismatch");
  Require(clean.sample_rate == fitted_noise.sample_rate,
          "MixAtSnr: sample rate mismatch");
  double p_clean = RmsPower(clean);
  double p_noise = RmsPower(fitted_noise);
  Require(p_clean > 0.0, "MixAtSnr: silent clean signal (SNR undefined)");
  Require(p_noise > 0.0, "MixAtSnr: silent noise (SNR undefined)");
  // snr = 10*log10(p_clean / (g^2 * p_noise))
  double g = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  Waveform out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(clean.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = clean.samples[i] + g * fitted_noise.samples[i];
  return out;
}

Waveform MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db,
                  RandomStream *rng) {
  Require(!clean.samples.empty(), "MixAtSnr: empty clean signal");
  Require(clean.sample_rate == noise.sample_rate,
          "MixAtSnr: sample rate mismatch");
  Waveform fitted = FitNoiseTo(noise, clean.samples.size(), rng);
  return MixAtSnrFitted(clean, fitted, snr_db);
}

Waveform MakeBabble(const std::vector<Waveform> &speech_pool, int k,
                    RandomStream *rng) {
  Require(k >= 3 && k <= 6, "MakeBabble: k must be in [3, 6]");
  Require(speech_pool.size() >= static_cast<size_t>(k),
          "MakeBabble: pool smaller than k");
  std::vector<size_t> chosen = rng->SampleDistinct(speech_pool.size(),
                                                   static_cast<size_t>(k));
  size_t max_len = 0;
  for (size_t idx : chosen)
    max_len = std::max(max_len, speech_pool[idx].samples.size());
  Require(max_len > 0, "MakeBabble: empty pool member");

  Waveform out;
  out.sample_rate = speech_pool[chosen[0]].sample_rate;
  out.samples.assign(max_len, 0.0);
  for (size_t idx : chosen) {
    Require(speech_pool[idx].sample_rate == out.sample_rate,
            "MakeBabble: sample rate mismatch in pool");
    Waveform fitted = FitNoiseTo(speech_pool[idx], max_len, rng);
    for (size_t i = 0; i < max_len; ++i) out.samples[i] += fitted.samples[i];
  }

  double peak = 0.0;
  for (double s : out.samples) peak = std::max(peak, std::fabs(s));
  Require(peak > 0.0, "MakeBabble: degenerate babble (silent sum)");
  PeakNormalize(&out, 0.9);
  return out;
}

Waveform MakeTelevision(const Waveform &music, const Waveform &speech,
                        RandomStream *rng) {
  Require(!music.samples.empty() && !speech.samples.empty(),
          "MakeTelevision: empty input");
  Require(music.sample_rate == speech.sample_rate,
          "MakeTelevision: sample rate mismatch");
  double p_music = RmsPower(music);
  double p_speech = RmsPower(speech);
  Require(p_music > 0.0 && p_speech > 0.0, "MakeTelevision: silent input");

  size_t out_len = std::max(music.samples.size(), speech.samples.size());
  Waveform m = FitNoiseTo(music, out_len, rng);
  Waveform s = FitNoiseTo(speech, out_len, rng);
  double g = std::sqrt(p_music / p_speech);  // speech scaled to music's power

  Waveform out;
  out.sample_rate = music.sample_rate;
  out.samples.resize(out_len);
  for (size_t i = 0; i < out_len; ++i)
    out.samples[i] = m.samples[i] + g * s.samples[i];
  PeakNormalize(&out, 0.9);
  return out;
}

}  // namespace vivet
