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

#ifndef SVMIX_FEATURES_HPP
#define SVMIX_FEATURES_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "svmix/signal.hpp"

namespace svmix::feat {

// Row-major T x F log mel-band energy matrix.
struct FeatureMatrix {
  std::size_t t = 0;
  std::size_t f = 0;
  std::vector<double> v;
  double frame_ms = 0.0;
  double hop_ms = 0.0;

  double& at(std::size_t ti, std::size_t fi) { return v[ti * f + fi]; }
  double at(std::size_t ti, std::size_t fi) const { return v[ti * f + fi]; }
  double* row(std::size_t ti) { return v.data() + ti * f; }
  const double* row(std::size_t ti) const { return v.data() + ti * f; }
};

// Triangular filters spaced on the mel scale over [fmin, fmax].
struct MelFilterbank {
  MelFilterbank(std::size_t n_bins, std::size_t nfft, int sample_rate,
                double fmin_hz, double fmax_hz);

  static double hz_to_mel(double hz);
  static double mel_to_hz(double mel);

  struct Filter {
    std::size_t first = 0;          // first spectrum index with weight
    std::vector<double> weights;    // contiguous triangular weights
  };

  std::size_t n_bins = 0;
  std::size_t nfft = 0;
  std::vector<Filter> filters;
  std::vector<double> center_hz;    // triangle apex per band

  // weighted band energy over a magnitude spectrum of nfft/2+1 points
  double apply(std::size_t band, const double* spectrum) const;
};

// Frames the waveform (periodic Hann window), zero-pads each frame to the
// next power of two, takes magnitude spectra, pools into triangular
// mel-spaced bands, and applies a floored log.
// fmax_hz == 0 means Nyquist. Throws std::invalid_argument when the input
// is shorter than one frame.
FeatureMatrix extract_features(const signal::Waveform& w, double frame_ms,
                               double hop_ms, std::size_t n_bins,
                               double fmin_hz = 0.0, double fmax_hz = 0.0);

// Subtracts the per-band temporal mean.
FeatureMatrix mean_normalize(const FeatureMatrix& m);

// One frequency mask (width uniform in [0, max_freq_mask]) and one time
// mask (width uniform in [0, max_time_mask]), both filled with the matrix
// mean computed before masking. Draw order from Rng(seed): freq width,
// freq start, time width, time start.
FeatureMatrix spec_augment(const FeatureMatrix& m, std::size_t max_freq_mask,
                           std::size_t max_time_mask, std::uint64_t seed);

}  // namespace svmix::feat

#endif  // SVMIX_FEATURES_HPP
