// vivet/corpus.hpp
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

#ifndef VIVET_CORPUS_HPP_
#define VIVET_CORPUS_HPP_

#include <map>
#include <string>
#include <vector>

#include "vivet/common.hpp"
#include "vivet/signal.hpp"
#include "vivet/wav.hpp"

namespace vivet {

// Formant-harmonic voice model for one synthetic speaker.
struct SpeakerProfile {
  std::string speaker_id;
  double f0_hz = 120.0;                       // fundamental, [70, 320]
  double formants_hz[3] = {500, 1500, 2500};  // ascending, below Nyquist
  double bandwidths_hz[3] = {90, 120, 160};
  double harmonic_tilt_db_per_octave = -6.0;
  double jitter = 0.01;  // per-frame relative f0 perturbation

  void Validate(int sample_rate) const;
};

struct UttEntry {
  std::string utt_id;
  std::string speaker_id;
  std::string path;
  double duration_s = 0.0;
  std::string split;  // "train" or "test"
};

// Noise bank entry.  `type` names the NoiseType the clip serves: "music",
// "ambient", or "babble" (speech clips from held-out speakers; television is
// assembled from one music and one babble-source clip at mix time).
struct NoiseEntry {
  std::string noise_id;
  std::string type;
  std::string path;
  std::string split;
};

struct CorpusManifest {
  std::vector<UttEntry> utterances;
  std::vector<NoiseEntry> noises;
  std::string root_dir;

  std::vector<const UttEntry *> Split(const std::string &split) const;
  std::vector<const NoiseEntry *> NoiseSplit(const std::string &type,
                                             const std::string &split) const;
  const UttEntry &Find(const std::string &utt_id) const;
};

struct Trial {
  bool target = false;
  std::string enroll_utt;
  std::string test_utt;
};

struct TrialSet {
  std::vector<Trial> trials;
};

struct CorpusConfig {
  int n_speakers = 12;
  int utts_per_speaker = 20;
  double utt_duration_s = 3.0;
  double test_fraction = 0.2;  // per-speaker tail of utterances held out
  int n_babble_speakers = 4;
  int noise_clips_per_type_per_split = 8;
  double noise_clip_duration_s = 4.0;
  int sample_rate = 16000;
  uint64_t seed = 7;

  void Validate() const;
};

// Draws a random but plausible speaker voice for the given index.
SpeakerProfile RandomSpeakerProfile(const std::string &speaker_id,
                                    RandomStream *rng);

// Harmonic source at f0 with per-frame jitter, formant envelope, spectral
// tilt, syllable-like amplitude bursts; peak-normalized to 0.5.
Waveform SynthSpeaker(const SpeakerProfile &profile, double duration_s,
                      int sample_rate, RandomStream *rng);

// Band-shaped filtered noise.
Waveform MakeAmbientClip(double duration_s, int sample_rate, RandomStream *rng);

// Tone clusters with a rhythmic per-beat amplitude envelope.
Waveform MakeMusicClip(double duration_s, double beat_s, int sample_rate,
                       RandomStream *rng);

// Bank of `count` clips for one noise type.  kBabble yields speech clips from
// fresh (held-out) speakers; kTelevision is assembled at mix time from one
// music and one speech clip, so requesting a television bank is an error.
std::vector<Waveform> SynthNoiseBank(NoiseType kind, int count,
                                     double clip_duration_s, int sample_rate,
                                     RandomStream *rng);

// Deterministically writes WAVs, the utterance manifest and the noise
// manifest under out_dir.  Noise banks are split into disjoint train/test
// halves (disjoint ids and disjoint source seeds).
CorpusManifest BuildCorpus(const CorpusConfig &cfg, const std::string &out_dir);

// Target trials pair same-speaker test utterances; nontarget trials pair
// different speakers.  No repeats; deterministic given seed.
TrialSet BuildTrials(const CorpusManifest &manifest, int n_target,
                     int n_nontarget, uint64_t seed);

// Manifest and trial file I/O.
void WriteManifest(const CorpusManifest &manifest, const std::string &dir);
CorpusManifest ReadManifest(const std::string &dir);
void WriteTrials(const TrialSet &trials, const std::string &path);
TrialSet ReadTrials(const std::string &path);

}  // namespace vivet

#endif  // VIVET_CORPUS_HPP_
