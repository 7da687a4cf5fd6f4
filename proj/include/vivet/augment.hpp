// vivet/augment.hpp
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

#ifndef VIVET_AUGMENT_HPP_
#define VIVET_AUGMENT_HPP_

#include <map>
#include <string>
#include <vector>

#include "vivet/common.hpp"
#include "vivet/corpus.hpp"
#include "vivet/fbank.hpp"
#include "vivet/signal.hpp"

namespace vivet {

struct AugmentPolicy {
  double snr_low_db = 0.0;
  double snr_high_db = 20.0;
  // Draw weights over {music, ambient, television, babble}, in NoiseType
  // order.  Nonnegative, sum > 0; equal by default.
  double noise_type_weights[4] = {1.0, 1.0, 1.0, 1.0};
  int babble_k_min = 3;
  int babble_k_max = 6;

  void Validate() const;
};

// One resolved draw from the policy: which clips, at what SNR.
struct AugmentDraw {
  NoiseType type = NoiseType::kMusic;
  double snr_db = 0.0;
  int babble_k = 0;                    // 0 unless type == kBabble
  std::vector<std::string> noise_ids;  // clip ids, in draw order
};

struct PairProvenance {
  std::string utt_id;
  int epoch = 0;
  int step = 0;
  NoiseType noise_type = NoiseType::kMusic;
  std::vector<std::string> noise_ids;
  double snr_db = 0.0;
  size_t fit_offset = 0;  // start offset when fitting noise to the utterance
};

// Clean features, noisy features of the same utterance under identical
// framing, the speaker's class index, and how the noise was made.
struct PairSample {
  FeatureMatrix clean;
  FeatureMatrix noisy;
  int speaker_index = -1;
  PairProvenance provenance;
};

// Samples (type, SNR, clip ids) from the policy against one noise split.
// SNR is continuous uniform on [snr_low, snr_high]; babble draws k distinct
// speech clips with k uniform on [babble_k_min, babble_k_max]; television
// draws one music and one speech clip.
AugmentDraw DrawAugmentation(const AugmentPolicy &policy,
                             const CorpusManifest &manifest,
                             const std::string &noise_split, RandomStream *rng);

// Sorted speaker ids of the train split; index in this vector is the class
// label used by the identification loss.
std::vector<std::string> TrainSpeakers(const CorpusManifest &manifest);

// Generates clean/noisy feature pairs on the fly.  All audio is loaded once
// at construction; MakePair is then a pure function of
// (global_seed, epoch, step, utt_id), so pairs may be generated in any order
// or from any thread and still come out bit-identical.
class PairMaker {
 public:
  PairMaker(const CorpusManifest &manifest, const FbankConfig &fbank,
            const AugmentPolicy &policy, uint64_t global_seed);

  // Pairs only train-split utterances with train-split noise.
  PairSample MakePair(const std::string &utt_id, int epoch, int step) const;

  // Clean features only (augmentation-free training mode).
  PairSample MakeCleanOnly(const std::string &utt_id) const;

  int SpeakerIndexOf(const std::string &utt_id) const;
  const std::vector<std::string> &Speakers() const { return speakers_; }
  const CorpusManifest &Manifest() const { return manifest_; }
  const FbankConfig &Fbank() const { return fbank_; }
  const AugmentPolicy &Policy() const { return policy_; }

  // Noisy waveform for one utterance under one draw; shared by the online
  // and offline paths so both produce identical mixes for identical draws.
  Waveform MixDraw(const std::string &utt_id, const AugmentDraw &draw,
                   const std::string &noise_split, RandomStream *rng,
                   size_t *fit_offset) const;

  const Waveform &CleanWave(const std::string &utt_id) const;
  const FeatureMatrix &CleanFeatures(const std::string &utt_id) const;

 private:
  CorpusManifest manifest_;
  FbankConfig fbank_;
  AugmentPolicy policy_;
  uint64_t global_seed_;
  std::vector<std::string> speakers_;
  std::map<std::string, int> speaker_index_;
  std::map<std::string, Waveform> utt_waves_;
  std::map<std::string, FeatureMatrix> clean_features_;
  std::map<std::string, Waveform> noise_waves_;
};

// One pregenerated noisy copy of a train utterance.
struct OfflineEntry {
  std::string utt_id;
  int copy = 0;
  std::string path;  // relative to the offline set directory
  NoiseType noise_type = NoiseType::kMusic;
  double snr_db = 0.0;
  std::vector<std::string> noise_ids;
};

struct OfflineSet {
  std::string dir;
  std::vector<OfflineEntry> entries;

  const OfflineEntry &Find(const std::string &utt_id, int copy) const;
};

// Writes copies_per_utt noisy WAVs per train utterance, drawn once from the
// policy with train-split noise, plus offline_manifest.tsv.  Training in
// offline mode reuses these files verbatim.
OfflineSet MakeOfflineSet(const PairMaker &maker, int copies_per_utt,
                          uint64_t seed, const std::string &out_dir);

OfflineSet ReadOfflineSet(const std::string &dir);

// Fixed clean/noisy pairs for measuring embedding spread between clean and
// corrupted views of the same utterance: test-split utterances mixed with
// test-split noise under per-utterance seeds derived only from `seed`, so
// any two checkpoints are compared on identical pairs.
std::vector<PairSample> BuildPairedEvalSet(const PairMaker &maker,
                                           uint64_t seed);

// JSON-lines record of one generated pair, for auditing.
std::string ProvenanceJson(const PairProvenance &p);

}  // namespace vivet

#endif  // VIVET_AUGMENT_HPP_
