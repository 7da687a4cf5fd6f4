// vivet/fbank.hpp
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

#ifndef VIVET_FBANK_HPP_
#define VIVET_FBANK_HPP_

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vivet/wav.hpp"

namespace vivet {

struct FbankConfig {
  int sample_rate = 16000;
  int win_length = 400;   // 25 ms
  int hop_length = 160;   // 10 ms
  int n_fft = 512;        // power of two
  int n_mels = 64;
  double fmin = 20.0;
  double fmax = 7600.0;
  double log_floor = 1e-10;
  bool mean_normalize = false;  // optional per-utterance mean subtraction

  void Validate() const;
};

// Frames x n_mels log-energy matrix, row-major.
struct FeatureMatrix {
  std::vector<double> values;
  int frames = 0;
  int n_mels = 0;
  double frame_shift_s = 0.01;

  double At(int t, int m) const { return values[static_cast<size_t>(t) * n_mels + m]; }
  double &At(int t, int m) { return values[static_cast<size_t>(t) * n_mels + m]; }
};

// HTK mel scale.
inline double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// floor((n_samples - win) / hop) + 1; errors if shorter than one window.
int FrameCount(size_t n_samples, const FbankConfig &cfg);

// Unit-peak triangular filters on the HTK mel scale; n_mels x (n_fft/2 + 1),
// row-major.
std::vector<double> MelFilterbank(const FbankConfig &cfg);

// Hamming window -> |DFT|^2 -> mel filterbank -> ln(energy + log_floor).
FeatureMatrix LogMel(const Waveform &w, const FbankConfig &cfg);

// In-place iterative radix-2 FFT (n must be a power of two).
void Fft(std::vector<std::complex<double>> *x, bool inverse);

// Feature dump: magic, frames, n_mels header, then row-major float32.
void WriteFeatureFile(const FeatureMatrix &fm, const std::string &path);
FeatureMatrix ReadFeatureFile(const std::string &path);

}  // namespace vivet

#endif  // VIVET_FBANK_HPP_
