// corpus.cpp
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

#include "vivet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace vivet {

namespace {

std::string FormatId(const std::string &prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix.c_str(), index);
  return buf;
}

// Parallel Lorentzian resonances plus a per-octave tilt, evaluated at f.
double SpectralEnvelope(const SpeakerProfile &p, double f) {
  double g = 0.0;
  for (int i = 0; i < 3; ++i) {
    double half_bw = p.bandwidths_hz[i] / 2.0;
    double d = (f - p.formants_hz[i]) / half_bw;
    g += 1.0 / (1.0 + d * d);
  }
  double octaves = std::log2(std::max(f, p.f0_hz) / p.f0_hz);
  g *= std::pow(10.0, p.harmonic_tilt_db_per_octave * octaves / 20.0);
  return g;
}

}  // namespace

void SpeakerProfile::Validate(int sample_rate) const {
  Require(f0_hz >= 70.0 && f0_hz <= 320.0,
          "SpeakerProfile: f0 must be in [70, 320] Hz");
  double nyquist = sample_rate / 2.0;
  for (int i = 0; i < 3; ++i) {
    Require(formants_hz[i] < nyquist, "SpeakerProfile: formant above Nyquist");
    Require(bandwidths_hz[i] > 0.0, "SpeakerProfile: bandwidth must be positive");
    if (i > 0)
      Require(formants_hz[i] > formants_hz[i - 1],
              "SpeakerProfile: formants must ascend");
  }
  Require(jitter >= 0.0 && jitter < 0.2, "SpeakerProfile: jitter out of range");
}

void CorpusConfig::Validate() const {
  Require(n_speakers >= 2, "CorpusConfig: need at least 2 speakers");
  Require(utts_per_speaker >= 2, "CorpusConfig: need at least 2 utterances per speaker");
  Require(utt_duration_s >= 1.0, "CorpusConfig: utterances must be >= 1 s");
  Require(test_fraction > 0.0 && test_fraction < 1.0,
          "CorpusConfig: test_fraction must be in (0, 1)");
  Require(n_babble_speakers >= 1, "CorpusConfig: need babble-source speakers");
  Require(noise_clips_per_type_per_split >= 1, "CorpusConfig: need noise clips");
  Require(sample_rate > 0, "CorpusConfig: bad sample rate");
}

SpeakerProfile RandomSpeakerProfile(const std::string &speaker_id,
                                    RandomStream *rng) {
  // The id is folded into the draws so distinct speakers get distinct
  // voices even from identically seeded streams.
  RandomStream local(MixSeed({rng->NextU64(), Fnv1a(speaker_id)}));
  SpeakerProfile p;
  p.speaker_id = speaker_id;
  // Log-uniform pitch spread across a plausible adult range.
  p.f0_hz = 90.0 * std::exp(local.Uniform() * std::log(280.0 / 90.0));
  p.formants_hz[0] = local.Uniform(320.0, 900.0);
  p.formants_hz[1] = p.formants_hz[0] + local.Uniform(450.0, 1400.0);
  p.formants_hz[2] = p.formants_hz[1] + local.Uniform(500.0, 1200.0);
  p.bandwidths_hz[0] = local.Uniform(60.0, 140.0);
  p.bandwidths_hz[1] = local.Uniform(80.0, 180.0);
  p.bandwidths_hz[2] = local.Uniform(120.0, 260.0);
  p.harmonic_tilt_db_per_octave = local.Uniform(-10.0, -3.0);
  p.jitter = local.Uniform(0.004, 0.02);
  return p;
}

Waveform SynthSpeaker(const SpeakerProfile &profile, double duration_s,
                      int sample_rate, RandomStream *rng) {
  Require(duration_s >= 1.0, "SynthSpeaker: duration must be >= 1 s");
  profile.Validate(sample_rate);

  size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);

  // Small per-utterance pitch offset so a speaker's utterances differ.
  // Scaled by the jitter so a jitter-free profile stays exactly periodic.
  double f0_utt =
      profile.f0_hz * (1.0 + 2.0 * profile.jitter * (2.0 * rng->Uniform() - 1.0));

  // Harmonic amplitudes from the formant envelope, fixed for the utterance.
  double band_limit = std::min(7600.0, 0.45 * sample_rate);
  int n_harm = std::max(1, static_cast<int>(band_limit / f0_utt));
  std::vector<double> amp(static_cast<size_t>(n_harm) + 1, 0.0);
  for (int h = 1; h <= n_harm; ++h)
    amp[h] = SpectralEnvelope(profile, h * f0_utt);

  // Per-frame (10 ms) jittered f0 track.
  int frame_len = sample_rate / 100;
  size_t n_frames = (n + frame_len - 1) / frame_len;
  std::vector<double> f0_track(n_frames);
  for (size_t t = 0; t < n_frames; ++t) {
    double u = 2.0 * rng->Uniform() - 1.0;
    f0_track[t] = f0_utt * (1.0 + profile.jitter * u);
  }

  // Syllable-like bursts: voiced spans with raised-cosine edges and gaps.
  std::vector<double> env(n, 0.0);
  size_t pos = 0;
  double edge_s = 0.02;
  size_t edge = static_cast<size_t>(edge_s * sample_rate);
  while (pos < n) {
    size_t voiced = static_cast<size_t>(rng->Uniform(0.15, 0.35) * sample_rate);
    size_t gap = static_cast<size_t>(rng->Uniform(0.05, 0.15) * sample_rate);
    double level = rng->Uniform(0.7, 1.0);
    size_t end = std::min(n, pos + voiced);
    for (size_t i = pos; i < end; ++i) {
      double a = level;
      size_t into = i - pos, left = end - 1 - i;
      if (into < edge) a *= 0.5 - 0.5 * std::cos(M_PI * into / edge);
      if (left < edge) a *= 0.5 - 0.5 * std::cos(M_PI * left / edge);
      env[i] = a;
    }
    pos = end + gap;
  }

  double phase = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double f0_now = f0_track[std::min(i / frame_len, n_frames - 1)];
    phase += 2.0 * M_PI * f0_now / sample_rate;
    if (phase > 2.0 * M_PI * 1e6) phase -= 2.0 * M_PI * 1e6;
    if (env[i] == 0.0) continue;
    double s = 0.0;
    for (int h = 1; h <= n_harm; ++h) s += amp[h] * std::sin(h * phase);
    w.samples[i] = env[i] * s;
  }

  PeakNormalize(&w, 0.5);
  return w;
}

Waveform MakeAmbientClip(double duration_s, int sample_rate, RandomStream *rng) {
  size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(n);

  // White noise with a mild one-pole lowpass blended in; keeps the spectrum
  // noise-like (flatness well above 0.3) while varying the coloration.
  double fc = rng->Uniform(1200.0, 4500.0);
  double mix = rng->Uniform(0.25, 0.55);
  double a = std::exp(-2.0 * M_PI * fc / sample_rate);
  double lp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double x = rng->Normal();
    lp = a * lp + (1.0 - a) * x;
    w.samples[i] = (1.0 - mix) * x + mix * 6.0 * lp;
  }
  PeakNormalize(&w, 0.9);
  return w;
}

Waveform MakeMusicClip(double duration_s, double beat_s, int sample_rate,
                       RandomStream *rng) {
  Require(beat_s > 0.05, "MakeMusicClip: beat too short");
  size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);

  static const double kPentatonic[5] = {1.0, 9.0 / 8.0, 5.0 / 4.0, 3.0 / 2.0, 5.0 / 3.0};
  double base = rng->Uniform(180.0, 360.0);
  size_t beat_len = static_cast<size_t>(beat_s * sample_rate);
  size_t n_beats = (n + beat_len - 1) / beat_len;

  std::vector<double> chord;
  int beats_left = 0;
  for (size_t b = 0; b < n_beats; ++b) {
    if (beats_left == 0) {
      beats_left = static_cast<int>(rng->UniformIntRange(2, 4));
      int notes = static_cast<int>(rng->UniformIntRange(2, 4));
      chord.clear();
      for (int k = 0; k < notes; ++k) {
        double ratio = kPentatonic[rng->UniformInt(5)];
        double octave = std::pow(2.0, static_cast<double>(rng->UniformIntRange(0, 2)));
        chord.push_back(base * ratio * octave);
      }
    }
    --beats_left;

    size_t start = b * beat_len;
    size_t end = std::min(n, start + beat_len);
    size_t attack = static_cast<size_t>(0.01 * sample_rate);
    double decay_tau = beat_s / 3.0;
    for (size_t i = start; i < end; ++i) {
      double t = static_cast<double>(i - start) / sample_rate;
      double e = std::exp(-t / decay_tau);
      if (i - start < attack) e *= static_cast<double>(i - start) / attack;
      double s = 0.0;
      for (double f : chord) s += std::sin(2.0 * M_PI * f * t);
      w.samples[i] = e * s / static_cast<double>(chord.size());
    }
  }
  PeakNormalize(&w, 0.9);
  return w;
}

std::vector<Waveform> SynthNoiseBank(NoiseType kind, int count,
                                     double clip_duration_s, int sample_rate,
                                     RandomStream *rng) {
  Require(count >= 1, "SynthNoiseBank: count must be >= 1");
  Require(kind != NoiseType::kTelevision,
          "SynthNoiseBank: television is assembled from music and speech at "
          "mix time; it has no bank of its own");

  std::vector<Waveform> bank;
  bank.reserve(static_cast<size_t>(count));
  switch (kind) {
    case NoiseType::kAmbient:
      for (int i = 0; i < count; ++i)
        bank.push_back(MakeAmbientClip(clip_duration_s, sample_rate, rng));
      break;
    case NoiseType::kMusic:
      for (int i = 0; i < count; ++i) {
        double beat = rng->Uniform(0.35, 0.65);
        bank.push_back(MakeMusicClip(clip_duration_s, beat, sample_rate, rng));
      }
      break;
    case NoiseType::kBabble: {
      // Speech clips from fresh speakers that exist only in this bank.
      int n_speakers = std::min(count, 4);
      std::vector<SpeakerProfile> profiles;
      for (int i = 0; i < n_speakers; ++i)
        profiles.push_back(RandomSpeakerProfile(FormatId("babblespk", i), rng));
      for (int i = 0; i < count; ++i) {
        const SpeakerProfile &p = profiles[static_cast<size_t>(i) % profiles.size()];
        bank.push_back(SynthSpeaker(p, clip_duration_s, sample_rate, rng));
      }
      break;
    }
    case NoiseType::kTelevision:
      break;  // unreachable
  }
  return bank;
}

std::vector<const UttEntry *> CorpusManifest::Split(const std::string &split) const {
  std::vector<const UttEntry *> out;
  for (const auto &u : utterances)
    if (u.split == split) out.push_back(&u);
  return out;
}

std::vector<const NoiseEntry *> CorpusManifest::NoiseSplit(
    const std::string &type, const std::string &split) const {
  std::vector<const NoiseEntry *> out;
  for (const auto &e : noises)
    if (e.type == type && e.split == split) out.push_back(&e);
  return out;
}

const UttEntry &CorpusManifest::Find(const std::string &utt_id) const {
  for (const auto &u : utterances)
    if (u.utt_id == utt_id) return u;
  throw Error("CorpusManifest: unknown utterance '" + utt_id + "'");
}

CorpusManifest BuildCorpus(const CorpusConfig &cfg, const std::string &out_dir) {
  cfg.Validate();
  fs::create_directories(fs::path(out_dir) / "wav");
  fs::create_directories(fs::path(out_dir) / "noise");

  CorpusManifest manifest;
  manifest.root_dir = out_dir;

  int n_test = std::max(1, static_cast<int>(std::lround(cfg.test_fraction *
                                                        cfg.utts_per_speaker)));
  Require(n_test < cfg.utts_per_speaker,
          "BuildCorpus: test fraction leaves no training utterances");

  // Speaker voices are a pure function of (seed, speaker index); utterances of
  // (seed, speaker, utterance), so generation order does not matter.
  for (int s = 0; s < cfg.n_speakers; ++s) {
    std::string spk_id = FormatId("spk", s);
    RandomStream profile_rng(MixSeed({cfg.seed, Fnv1a("profile"), static_cast<uint64_t>(s)}));
    SpeakerProfile profile = RandomSpeakerProfile(spk_id, &profile_rng);
    for (int u = 0; u < cfg.utts_per_speaker; ++u) {
      RandomStream utt_rng(MixSeed({cfg.seed, Fnv1a("utt"),
                                    static_cast<uint64_t>(s),
                                    static_cast<uint64_t>(u)}));
      Waveform w = SynthSpeaker(profile, cfg.utt_duration_s, cfg.sample_rate,
                                &utt_rng);
      UttEntry entry;
      entry.utt_id = spk_id + "_" + FormatId("utt", u);
      entry.speaker_id = spk_id;
      entry.path = "wav/" + entry.utt_id + ".wav";
      entry.duration_s = w.DurationSeconds();
      entry.split = (u >= cfg.utts_per_speaker - n_test) ? "test" : "train";
      WriteWav(w, (fs::path(out_dir) / entry.path).string());
      manifest.utterances.push_back(entry);
    }
  }

  // Noise banks: one rng stream per (type, split) so the splits are disjoint
  // at the source-seed level, not just by id.
  const struct { NoiseType kind; const char *name; } kinds[] = {
      {NoiseType::kMusic, "music"},
      {NoiseType::kAmbient, "ambient"},
      {NoiseType::kBabble, "babble"},
  };
  for (const auto &k : kinds) {
    for (const std::string split : {"train", "test"}) {
      RandomStream noise_rng(MixSeed({cfg.seed, Fnv1a("noise"), Fnv1a(k.name),
                                      Fnv1a(split)}));
      std::vector<Waveform> bank =
          SynthNoiseBank(k.kind, cfg.noise_clips_per_type_per_split,
                         cfg.noise_clip_duration_s, cfg.sample_rate, &noise_rng);
      for (size_t i = 0; i < bank.size(); ++i) {
        NoiseEntry entry;
        entry.noise_id = std::string(k.name) + "_" + split + "_" +
                         FormatId("", static_cast<int>(i));
        entry.type = k.name;
        entry.path = "noise/" + entry.noise_id + ".wav";
        entry.split = split;
        WriteWav(bank[i], (fs::path(out_dir) / entry.path).string());
        manifest.noises.push_back(entry);
      }
    }
  }

  WriteManifest(manifest, out_dir);
  return manifest;
}

TrialSet BuildTrials(const CorpusManifest &manifest, int n_target,
                     int n_nontarget, uint64_t seed) {
  Require(n_target >= 1 && n_nontarget >= 1,
          "BuildTrials: need at least one trial of each kind");
  std::vector<const UttEntry *> test = manifest.Split("test");
  Require(!test.empty(), "BuildTrials: no test utterances");

  std::vector<Trial> targets, nontargets;
  for (size_t i = 0; i < test.size(); ++i) {
    for (size_t j = i + 1; j < test.size(); ++j) {
      Trial t;
      t.target = (test[i]->speaker_id == test[j]->speaker_id);
      t.enroll_utt = test[i]->utt_id;
      t.test_utt = test[j]->utt_id;
      (t.target ? targets : nontargets).push_back(t);
    }
  }
  Require(static_cast<size_t>(n_target) <= targets.size(),
          "BuildTrials: requested more target trials than same-speaker pairs (" +
              ToString(targets.size()) + " available)");
  Require(static_cast<size_t>(n_nontarget) <= nontargets.size(),
          "BuildTrials: requested more nontarget trials than cross-speaker pairs (" +
              ToString(nontargets.size()) + " available)");

  RandomStream rng(MixSeed({seed, Fnv1a("trials")}));
  rng.Shuffle(&targets);
  rng.Shuffle(&nontargets);

  TrialSet out;
  out.trials.assign(targets.begin(), targets.begin() + n_target);
  out.trials.insert(out.trials.end(), nontargets.begin(),
                    nontargets.begin() + n_nontarget);
  rng.Shuffle(&out.trials);
  return out;
}

void WriteManifest(const CorpusManifest &manifest, const std::string &dir) {
  {
    std::ofstream out(fs::path(dir) / "manifest.tsv", std::ios::trunc);
    Require(out.good(), "WriteManifest: cannot write manifest.tsv");
    for (const auto &u : manifest.utterances) {
      char dur[32];
      std::snprintf(dur, sizeof(dur), "%.3f", u.duration_s);
      out << u.utt_id << '\t' << u.speaker_id << '\t' << u.path << '\t' << dur
          << '\t' << u.split << '\n';
    }
  }
  {
    std::ofstream out(fs::path(dir) / "noise_manifest.tsv", std::ios::trunc);
    Require(out.good(), "WriteManifest: cannot write noise_manifest.tsv");
    for (const auto &e : manifest.noises)
      out << e.noise_id << '\t' << e.type << '\t' << e.path << '\t' << e.split
          << '\n';
  }
}

CorpusManifest ReadManifest(const std::string &dir) {
  CorpusManifest manifest;
  manifest.root_dir = dir;
  std::set<std::string> seen_ids;

  std::ifstream in(fs::path(dir) / "manifest.tsv");
  Require(in.good(), "ReadManifest: cannot open manifest.tsv under " + dir);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    UttEntry u;
    std::string dur;
    Require(static_cast<bool>(std::getline(ss, u.utt_id, '\t')) &&
                static_cast<bool>(std::getline(ss, u.speaker_id, '\t')) &&
                static_cast<bool>(std::getline(ss, u.path, '\t')) &&
                static_cast<bool>(std::getline(ss, dur, '\t')) &&
                static_cast<bool>(std::getline(ss, u.split)),
            "ReadManifest: malformed line: " + line);
    u.duration_s = std::stod(dur);
    Require(seen_ids.insert(u.utt_id).second,
            "ReadManifest: duplicate utterance id " + u.utt_id);
    manifest.utterances.push_back(u);
  }
  Require(!manifest.utterances.empty(), "ReadManifest: empty manifest");

  std::ifstream nin(fs::path(dir) / "noise_manifest.tsv");
  if (nin.good()) {
    while (std::getline(nin, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      NoiseEntry e;
      Require(static_cast<bool>(std::getline(ss, e.noise_id, '\t')) &&
                  static_cast<bool>(std::getline(ss, e.type, '\t')) &&
                  static_cast<bool>(std::getline(ss, e.path, '\t')) &&
                  static_cast<bool>(std::getline(ss, e.split)),
              "ReadManifest: malformed noise line: " + line);
      manifest.noises.push_back(e);
    }
  }
  return manifest;
}

void WriteTrials(const TrialSet &trials, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  Require(out.good(), "WriteTrials: cannot open " + path);
  for (const auto &t : trials.trials)
    out << (t.target ? "target" : "nontarget") << ' ' << t.enroll_utt << ' '
        << t.test_utt << '\n';
}

TrialSet ReadTrials(const std::string &path) {
  std::ifstream in(path);
  Require(in.good(), "ReadTrials: cannot open " + path);
  TrialSet out;
  std::string label, enroll, test;
  while (in >> label >> enroll >> test) {
    Trial t;
    Require(label == "target" || label == "nontarget",
            "ReadTrials: bad label '" + label + "'");
    t.target = (label == "target");
    t.enroll_utt = enroll;
    t.test_utt = test;
    out.trials.push_back(t);
  }
  Require(!out.trials.empty(), "ReadTrials: no trials in " + path);
  return out;
}

}  // namespace vivet
