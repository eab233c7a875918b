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

#ifndef SVMIX_MIXUP_HPP
#define SVMIX_MIXUP_HPP

#include <cstdint>
#include <vector>

#include "svmix/signal.hpp"

namespace svmix::mix {

struct BetaParams {
  double alpha = 0.2;
  double beta = 0.2;
};

// At most two weighted speakers; weights sum to one.
struct SoftLabel {
  struct Entry {
    int speaker_id = 0;
    double weight = 0.0;
  };
  Entry entries[2];
  int count = 0;

  static SoftLabel single(int speaker_id) {
    SoftLabel l;
    l.entries[0] = {speaker_id, 1.0};
    l.count = 1;
    return l;
  }
};

struct MixupDraw {
  double lambda = 1.0;
  std::size_t partner = 0;
};

// Scales to unit L2 norm. Throws std::domain_error on zero energy.
signal::Waveform energy_normalize(const signal::Waveform& w);

// lambda * a/|a| + (1-lambda) * b/|b|; shapes and rates must match.
signal::Waveform mix_waveforms(const signal::Waveform& a,
                               const signal::Waveform& b, double lambda);

// Weighted label pair; collapses a == b and prunes zero weights.
SoftLabel mix_labels(int a, int b, double lambda);

double sample_lambda(const BetaParams& params, std::uint64_t seed);

// Partner assignment is a uniformly random in-batch permutation, redrawn
// until it has no fixed point, plus one lambda per element. Partner and
// lambda streams are derived independently of the redraw count.
std::vector<MixupDraw> batch_mixup_plan(std::size_t batch_size,
                                        const BetaParams& params,
                                        std::uint64_t seed);

// Adds the interferer (tiled cyclically to the target length) at a gain
// realizing snr_db against the target; the target is left unscaled.
signal::Waveform snr_mix(const signal::Waveform& target,
                         const signal::Waveform& interferer, double snr_db);

}  // namespace svmix::mix

#endif  // SVMIX_MIXUP_HPP
