// Copyright 2026 the svmix authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SVMIX_SIGNAL_HPP
#define SVMIX_SIGNAL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace svmix::signal {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
  double rms() const;
};

struct SpectralComponent {
  double freq_hz = 0.0;
  double amp = 0.0;
};

// Synthetic speaker identity: a fixed set of sinusoidal components whose
// frequencies are jittered per utterance, so a speaker's utterances differ
// while the class stays separable.
struct SpeakerProfile {
  int speaker_id = 0;
  std::vector<SpectralComponent> components;
  // relative stddev of the per-utterance frequency perturbation
  double fundamental_jitter = 0.0;
};

// Deterministic utterance synthesis: jittered sinusoid mixture plus white
// noise at `noise_floor` RMS, then the overall level is clamped into
// [0.05, 0.95] RMS. Draw order from Rng(seed): per component (jitter z,
// phase), then one normal per noise sample.
// Throws std::invalid_argument if any component frequency is at or above
// Nyquist, or an amplitude is not positive.
Waveform synth_utterance(const SpeakerProfile& profile, double duration_s,
                         int sample_rate, double noise_floor,
                         std::uint64_t seed);

// Random fixed-length crop. Inputs shorter than the crop are tiled
// end-to-end (ceil(crop/len) copies) before the offset is drawn.
Waveform random_crop(const Waveform& w, double crop_s, std::uint64_t seed);

// 16-bit PCM mono little-endian RIFF.
void write_wav(const std::string& path, const Waveform& w);
Waveform read_wav(const std::string& path);

// Line-oriented speaker pool manifest: `speaker_id freq1:amp1 freq2:amp2 ...`
void write_speaker_manifest(const std::string& path,
                            const std::vector<SpeakerProfile>& pool);
// `jitter` is not part of the manifest; callers supply it (one value for
// the whole pool, from the experiment configuration).
std::vector<SpeakerProfile> read_speaker_manifest(const std::string& path,
                                                  double jitter);

}  // namespace svmix::signal

#endif  // SVMIX_SIGNAL_HPP
