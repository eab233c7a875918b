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

#ifndef SVMIX_DATA_HPP
#define SVMIX_DATA_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "svmix/signal.hpp"

namespace svmix::data {

// Lazily synthesized, cached utterances for a fixed speaker list. Each
// (speaker, index) utterance has a seed derived from (data_seed, speaker_id,
// index), so any consumer holding the same bank parameters sees identical
// audio.
class UtteranceBank {
 public:
  UtteranceBank(std::vector<signal::SpeakerProfile> pool, int sample_rate,
                double utt_seconds, double noise_floor, int utts_per_speaker,
                std::uint64_t data_seed);

  std::size_t n_speakers() const { return pool_.size(); }
  int utts_per_speaker() const { return utts_per_speaker_; }
  int sample_rate() const { return sample_rate_; }
  const signal::SpeakerProfile& profile(std::size_t i) const { return pool_.at(i); }
  const std::vector<signal::SpeakerProfile>& profiles() const { return pool_; }

  const signal::Waveform& get(std::size_t speaker_index, int utt_index);

 private:
  std::vector<signal::SpeakerProfile> pool_;
  int sample_rate_;
  double utt_seconds_;
  double noise_floor_;
  int utts_per_speaker_;
  std::uint64_t data_seed_;
  std::vector<std::optional<signal::Waveform>> cache_;
};

}  // namespace svmix::data

#endif  // SVMIX_DATA_HPP
