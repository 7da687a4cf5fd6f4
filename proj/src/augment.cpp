// augment.cpp
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

#include "vivet/augment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace vivet {

void AugmentPolicy::Validate() const {
  Require(snr_low_db <= snr_high_db, "AugmentPolicy: snr_low > snr_high");
  double sum = 0.0;
  for (double w : noise_type_weights) {
    Require(w >= 0.0, "AugmentPolicy: negative noise type weight");
    sum += w;
  }
  Require(sum > 0.0, "AugmentPolicy: all noise type weights are zero");
  Require(babble_k_min >= 3 && babble_k_max <= 6 && babble_k_min <= babble_k_max,
          "AugmentPolicy: babble k range must sit inside [3, 6]");
}

namespace {

const NoiseType kTypeOrder[4] = {NoiseType::kMusic, NoiseType::kAmbient,
                                 NoiseType::kTelevision, NoiseType::kBabble};

std::string PickNoiseId(const CorpusManifest &manifest, const std::string &type,
                        const std::string &split, RandomStream *rng) {
  std::vector<const NoiseEntry *> bank = manifest.NoiseSplit(type, split);
  Require(!bank.empty(),
          "DrawAugmentation: empty " + type + " noise bank for split " + split);
  return bank[rng->UniformInt(bank.size())]->noise_id;
}

std::vector<std::string> PickDistinctNoiseIds(const CorpusManifest &manifest,
                                              const std::string &type,
                                              const std::string &split, int k,
                                              RandomStream *rng) {
  std::vector<const NoiseEntry *> bank = manifest.NoiseSplit(type, split);
  Require(bank.size() >= static_cast<size_t>(k),
          "DrawAugmentation: " + type + " bank for split " + split +
              " has fewer than " + ToString(k) + " clips");
  std::vector<size_t> idx = rng->SampleDistinct(bank.size(), static_cast<size_t>(k));
  std::vector<std::string> ids;
  ids.reserve(idx.size());
  for (size_t i : idx) ids.push_back(bank[i]->noise_id);
  return ids;
}

}  // namespace

AugmentDraw DrawAugmentation(const AugmentPolicy &policy,
                             const CorpusManifest &manifest,
                             const std::string &noise_split, RandomStream *rng) {
  policy.Validate();

  double sum = 0.0;
  for (double w : policy.noise_type_weights) sum += w;
  double u = rng->Uniform() * sum;
  int pick = 3;
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    acc += policy.noise_type_weights[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }

  AugmentDraw draw;
  draw.type = kTypeOrder[pick];
  draw.snr_db = rng->Uniform(policy.snr_low_db, policy.snr_high_db);
  switch (draw.type) {
    case NoiseType::kMusic:
      draw.noise_ids.push_back(PickNoiseId(manifest, "music", noise_split, rng));
      break;
    case NoiseType::kAmbient:
      draw.noise_ids.push_back(PickNoiseId(manifest, "ambient", noise_split, rng));
      break;
    case NoiseType::kTelevision:
      draw.noise_ids.push_back(PickNoiseId(manifest, "music", noise_split, rng));
      draw.noise_ids.push_back(PickNoiseId(manifest, "babble", noise_split, rng));
      break;
    case NoiseType::kBabble:
      draw.babble_k = static_cast<int>(
          rng->UniformIntRange(policy.babble_k_min, policy.babble_k_max));
      draw.noise_ids = PickDistinctNoiseIds(manifest, "babble", noise_split,
                                            draw.babble_k, rng);
      break;
  }
  return draw;
}

std::vector<std::string> TrainSpeakers(const CorpusManifest &manifest) {
  std::set<std::string> ids;
  for (const auto &u : manifest.utterances)
    if (u.split == "train") ids.insert(u.speaker_id);
  Require(!ids.empty(), "TrainSpeakers: no train utterances");
  return {ids.begin(), ids.end()};
}

PairMaker::PairMaker(const CorpusManifest &manifest, const FbankConfig &fbank,
                     const AugmentPolicy &policy, uint64_t global_seed)
    : manifest_(manifest),
      fbank_(fbank),
      policy_(policy),
      global_seed_(global_seed) {
  fbank_.Validate();
  policy_.Validate();
  speakers_ = TrainSpeakers(manifest_);
  for (size_t i = 0; i < speakers_.size(); ++i)
    speaker_index_[speakers_[i]] = static_cast<int>(i);

  for (const auto &u : manifest_.utterances) {
    Waveform w = ReadWav((fs::path(manifest_.root_dir) / u.path).string());
    Require(w.sample_rate == fbank_.sample_rate,
            "PairMaker: sample rate mismatch for " + u.utt_id);
    clean_features_[u.utt_id] = LogMel(w, fbank_);
    utt_waves_[u.utt_id] = std::move(w);
  }
  for (const auto &e : manifest_.noises)
    noise_waves_[e.noise_id] =
        ReadWav((fs::path(manifest_.root_dir) / e.path).string());
}

int PairMaker::SpeakerIndexOf(const std::string &utt_id) const {
  const UttEntry &u = manifest_.Find(utt_id);
  auto it = speaker_index_.find(u.speaker_id);
  Require(it != speaker_index_.end(),
          "PairMaker: speaker " + u.speaker_id + " not in the train split");
  return it->second;
}

const Waveform &PairMaker::CleanWave(const std::string &utt_id) const {
  auto it = utt_waves_.find(utt_id);
  Require(it != utt_waves_.end(), "PairMaker: unknown utterance " + utt_id);
  return it->second;
}

const FeatureMatrix &PairMaker::CleanFeatures(const std::string &utt_id) const {
  auto it = clean_features_.find(utt_id);
  Require(it != clean_features_.end(), "PairMaker: unknown utterance " + utt_id);
  return it->second;
}

Waveform PairMaker::MixDraw(const std::string &utt_id, const AugmentDraw &draw,
                            const std::string &noise_split, RandomStream *rng,
                            size_t *fit_offset) const {
  for (const auto &id : draw.noise_ids) {
    bool ok = false;
    for (const auto &e : manifest_.noises)
      if (e.noise_id == id && e.split == noise_split) ok = true;
    Require(ok, "MixDraw: noise id " + id + " is not in the " + noise_split +
                    " split");
  }

  const Waveform &clean = CleanWave(utt_id);
  Waveform noise;
  switch (draw.type) {
    case NoiseType::kMusic:
    case NoiseType::kAmbient:
      noise = noise_waves_.at(draw.noise_ids[0]);
      break;
    case NoiseType::kTelevision:
      noise = MakeTelevision(noise_waves_.at(draw.noise_ids[0]),
                             noise_waves_.at(draw.noise_ids[1]), rng);
      break;
    case NoiseType::kBabble: {
      std::vector<Waveform> pool;
      pool.reserve(draw.noise_ids.size());
      for (const auto &id : draw.noise_ids) pool.push_back(noise_waves_.at(id));
      noise = MakeBabble(pool, static_cast<int>(pool.size()), rng);
      break;
    }
  }

  size_t n = noise.samples.size();
  size_t target = clean.samples.size();
  size_t offset = (n >= target) ? rng->UniformInt(n - target + 1)
                                : rng->UniformInt(n);
  if (fit_offset) *fit_offset = offset;
  Waveform fitted = FitNoiseToAt(noise, target, offset);
  return MixAtSnrFitted(clean, fitted, draw.snr_db);
}

PairSample PairMaker::MakePair(const std::string &utt_id, int epoch,
                               int step) const {
  const UttEntry &u = manifest_.Find(utt_id);
  Require(u.split == "train", "MakePair: " + utt_id + " is not a train utterance");

  RandomStream rng(MixSeed({global_seed_, static_cast<uint64_t>(epoch),
                            static_cast<uint64_t>(step), Fnv1a(utt_id)}));
  AugmentDraw draw = DrawAugmentation(policy_, manifest_, "train", &rng);

  PairSample pair;
  pair.speaker_index = SpeakerIndexOf(utt_id);
  pair.clean = CleanFeatures(utt_id);
  size_t offset = 0;
  Waveform noisy = MixDraw(utt_id, draw, "train", &rng, &offset);
  pair.noisy = LogMel(noisy, fbank_);
  Require(pair.clean.frames == pair.noisy.frames &&
              pair.clean.n_mels == pair.noisy.n_mels,
          "MakePair: clean/noisy feature shape mismatch");

  pair.provenance.utt_id = utt_id;
  pair.provenance.epoch = epoch;
  pair.provenance.step = step;
  pair.provenance.noise_type = draw.type;
  pair.provenance.noise_ids = draw.noise_ids;
  pair.provenance.snr_db = draw.snr_db;
  pair.provenance.fit_offset = offset;
  return pair;
}

PairSample PairMaker::MakeCleanOnly(const std::string &utt_id) const {
  PairSample pair;
  pair.speaker_index = SpeakerIndexOf(utt_id);
  pair.clean = CleanFeatures(utt_id);
  pair.provenance.utt_id = utt_id;
  return pair;
}

const OfflineEntry &OfflineSet::Find(const std::string &utt_id, int copy) const {
  for (const auto &e : entries)
    if (e.utt_id == utt_id && e.copy == copy) return e;
  throw Error("OfflineSet: no copy " + ToString(copy) + " of " + utt_id);
}

OfflineSet MakeOfflineSet(const PairMaker &maker, int copies_per_utt,
                          uint64_t seed, const std::string &out_dir) {
  Require(copies_per_utt >= 1, "MakeOfflineSet: need at least one copy");
  fs::create_directories(fs::path(out_dir) / "noisy");

  OfflineSet set;
  set.dir = out_dir;
  for (const UttEntry *u : maker.Manifest().Split("train")) {
    for (int c = 0; c < copies_per_utt; ++c) {
      RandomStream rng(MixSeed({seed, Fnv1a("offline"), Fnv1a(u->utt_id),
                                static_cast<uint64_t>(c)}));
      AugmentDraw draw =
          DrawAugmentation(maker.Policy(), maker.Manifest(), "train", &rng);
      Waveform noisy = maker.MixDraw(u->utt_id, draw, "train", &rng, nullptr);

      OfflineEntry entry;
      entry.utt_id = u->utt_id;
      entry.copy = c;
      entry.path = "noisy/" + u->utt_id + "_aug" + ToString(c) + ".wav";
      entry.noise_type = draw.type;
      entry.snr_db = draw.snr_db;
      entry.noise_ids = draw.noise_ids;
      WriteWav(noisy, (fs::path(out_dir) / entry.path).string());
      set.entries.push_back(entry);
    }
  }

  std::ofstream out(fs::path(out_dir) / "offline_manifest.tsv", std::ios::trunc);
  Require(out.good(), "MakeOfflineSet: cannot write offline_manifest.tsv");
  for (const auto &e : set.entries) {
    char snr[32];
    std::snprintf(snr, sizeof(snr), "%.17g", e.snr_db);
    out << e.utt_id << '\t' << e.copy << '\t' << e.path << '\t'
        << NoiseTypeName(e.noise_type) << '\t' << snr << '\t';
    for (size_t i = 0; i < e.noise_ids.size(); ++i)
      out << (i ? "," : "") << e.noise_ids[i];
    out << '\n';
  }
  return set;
}

OfflineSet ReadOfflineSet(const std::string &dir) {
  std::ifstream in(fs::path(dir) / "offline_manifest.tsv");
  Require(in.good(), "ReadOfflineSet: cannot open offline_manifest.tsv in " + dir);
  OfflineSet set;
  set.dir = dir;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    OfflineEntry e;
    std::string copy, type, snr, ids;
    Require(static_cast<bool>(std::getline(ss, e.utt_id, '\t')) &&
                static_cast<bool>(std::getline(ss, copy, '\t')) &&
                static_cast<bool>(std::getline(ss, e.path, '\t')) &&
                static_cast<bool>(std::getline(ss, type, '\t')) &&
                static_cast<bool>(std::getline(ss, snr, '\t')) &&
                static_cast<bool>(std::getline(ss, ids)),
            "ReadOfflineSet: malformed line: " + line);
    e.copy = std::stoi(copy);
    e.noise_type = NoiseTypeFromName(type);
    e.snr_db = std::stod(snr);
    std::istringstream idss(ids);
    std::string id;
    while (std::getline(idss, id, ',')) e.noise_ids.push_back(id);
    set.entries.push_back(e);
  }
  Require(!set.entries.empty(), "ReadOfflineSet: empty offline manifest");
  return set;
}

std::vector<PairSample> BuildPairedEvalSet(const PairMaker &maker,
                                           uint64_t seed) {
  std::vector<PairSample> pairs;
  for (const UttEntry *u : maker.Manifest().Split("test")) {
    RandomStream rng(MixSeed({seed, Fnv1a("pairedeval"), Fnv1a(u->utt_id)}));
    AugmentDraw draw =
        DrawAugmentation(maker.Policy(), maker.Manifest(), "test", &rng);

    PairSample pair;
    pair.speaker_index = -1;  // test speakers have no class label
    pair.clean = maker.CleanFeatures(u->utt_id);
    size_t offset = 0;
    Waveform noisy = maker.MixDraw(u->utt_id, draw, "test", &rng, &offset);
    pair.noisy = LogMel(noisy, maker.Fbank());

    pair.provenance.utt_id = u->utt_id;
    pair.provenance.noise_type = draw.type;
    pair.provenance.noise_ids = draw.noise_ids;
    pair.provenance.snr_db = draw.snr_db;
    pair.provenance.fit_offset = offset;
    pairs.push_back(std::move(pair));
  }
  Require(!pairs.empty(), "BuildPairedEvalSet: no test utterances");
  return pairs;
}

std::string ProvenanceJson(const PairProvenance &p) {
  nlohmann::json j;
  j["utt"] = p.utt_id;
  j["epoch"] = p.epoch;
  j["step"] = p.step;
  j["type"] = NoiseTypeName(p.noise_type);
  j["noise_ids"] = p.noise_ids;
  j["snr_db"] = p.snr_db;
  j["offset"] = p.fit_offset;
  return j.dump();
}

}  // namespace vivet
