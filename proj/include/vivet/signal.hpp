// vivet/signal.hpp
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

#ifndef VIVET_SIGNAL_HPP_
#define VIVET_SIGNAL_HPP_

#include <string>
#include <vector>

#include "vivet/common.hpp"
#include "vivet/wav.hpp"

namespace vivet {

enum class NoiseType { kMusic, kAmbient, kTelevision, kBabble };

const char *NoiseTypeName(NoiseType t);
NoiseType NoiseTypeFromName(const std::string &name);

// Mean of squared samples (linear power).
double RmsPower(const Waveform &w);

// Peak-normalizes in place so that max |sample| == peak.  Errors on silence.
void PeakNormalize(Waveform *w, double peak);

// Length-matches noise to target_len: random contiguous crop when longer,
// end-to-end tiling from a random phase offset when shorter.  The offset is
// drawn from [0, len(noise)).
Waveform FitNoiseTo(const Waveform &noise, size_t target_len, RandomStream *rng);

// Deterministic variant with an explicit start offset (used when provenance
// must record the draw).
Waveform FitNoiseToAt(const Waveform &noise, size_t target_len, size_t offset);

// clean + g * noise', where noise' is noise fitted to len(clean) and g is
// chosen so that 10*log10(P_clean / P_{g*noise'}) == snr_db.
Waveform MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db,
                  RandomStream *rng);

// As above with pre-fitted noise (same length as clean).
Waveform MixAtSnrFitted(const Waveform &clean, const Waveform &fitted_noise,
                        double snr_db);

// Sum of k distinct pool members, each fitted to the longest chosen clip,
// peak-normalized to 0.9.  k must be in [3, 6].
Waveform MakeBabble(const std::vector<Waveform> &speech_pool, int k,
                    RandomStream *rng);

// Equal-power sum of one music and one speech clip (speech rescaled to the
// music clip's power), fitted to the longer length, peak-normalized to 0.9.
Waveform MakeTelevision(const Waveform &music, const Waveform &speech,
                        RandomStream *rng);

}  // namespace vivet

#endif  // VIVET_SIGNAL_HPP_
