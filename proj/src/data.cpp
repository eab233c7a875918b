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

#include "svmix/data.hpp"

#include <stdexcept>

#include "svmix/rng.hpp"

namespace svmix::data {

UtteranceBank::UtteranceBank(std::vector<signal::SpeakerProfile> pool,
                             int sample_rate, double utt_seconds,
                             double noise_floor, int utts_per_speaker,
                             std::uint64_t data_seed)
    : pool_(std::move(pool)),
      sample_rate_(sample_rate),
      utt_seconds_(utt_seconds),
      noise_floor_(noise_floor),
      utts_per_speaker_(utts_per_speaker),
      data_seed_(data_seed) {
  if (pool_.empty()) throw std::invalid_argument("UtteranceBank: empty speaker pool");
  if (utts_per_speaker_ <= 0)
    throw std::invalid_argument("UtteranceBank: need at least one utterance per speaker");
  cache_.resize(pool_.size() * static_cast<std::size_t>(utts_per_speaker_));
}

const signal::Waveform& UtteranceBank::get(std::size_t speaker_index,
                                           int utt_index) {
  if (speaker_index >= pool_.size())
    throw std::out_of_range("UtteranceBank: speaker index out of range");
  if (utt_index < 0 || utt_index >= utts_per_speaker_)
    throw std::out_of_range("UtteranceBank: utterance index out of range");
  auto& slot =
      cache_[speaker_index * static_cast<std::size_t>(utts_per_speaker_) +
             static_cast<std::size_t>(utt_index)];
  if (!slot) {
    const std::uint64_t seed =
        Rng(data_seed_)
            .child_seed(streams::kUtterance,
                        static_cast<std::uint64_t>(pool_[speaker_index].speaker_id),
                        static_cast<std::uint64_t>(utt_index));
    slot = signal::synth_utterance(pool_[speaker_index], utt_seconds_,
                                   sample_rate_, noise_floor_, seed);
  }
  return *slot;
}

}  // namespace svmix::data
