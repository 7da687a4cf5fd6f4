// vivet/wav.hpp
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

#ifndef VIVET_WAV_HPP_
#define VIVET_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace vivet {

// Mono waveform, amplitudes nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t NumSamples() const { return samples.size(); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct WavWriteStats {
  size_t clipped_samples = 0;
};

// Reads a RIFF/WAVE file.  Accepts PCM16 and IEEE float32, mono or
// multichannel (channels are averaged).  PCM16 is scaled so that -32768 maps
// to -1.0.
Waveform ReadWav(const std::string &path);

// Writes mono PCM16 little-endian.  Samples outside [-1, 1] are hard-clipped
// and counted.
WavWriteStats WriteWav(const Waveform &w, const std::string &path);

}  // namespace vivet

#endif  // VIVET_WAV_HPP_
