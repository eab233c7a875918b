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

#include "svmix/features.hpp"

#include <cmath>
#include <stdexcept>

#include "svmix/fft.hpp"
#include "svmix/kernels.hpp"
#include "svmix/rng.hpp"

namespace svmix::feat {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogFloor = 1e-10;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

double MelFilterbank::hz_to_mel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double MelFilterbank::mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(std::size_t bins, std::size_t fft_size,
                             int sample_rate, double fmin_hz, double fmax_hz)
    : n_bins(bins), nfft(fft_size) {
  if (bins == 0) throw std::invalid_argument("MelFilterbank: need at least one band");
  if (sample_rate <= 0) throw std::invalid_argument("MelFilterbank: bad sample rate");
  if (fmax_hz <= 0.0) fmax_hz = sample_rate / 2.0;
  if (!(fmin_hz >= 0.0) || !(fmax_hz > fmin_hz) || fmax_hz > sample_rate / 2.0)
    throw std::invalid_argument("MelFilterbank: bad frequency range");

  const double mlo = hz_to_mel(fmin_hz);
  const double mhi = hz_to_mel(fmax_hz);
  std::vector<double> edges(bins + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mlo + (mhi - mlo) * static_cast<double>(i) /
                                   static_cast<double>(bins + 1));

  const std::size_t half = nfft / 2 + 1;
  const double hz_per_bin = static_cast<double>(sample_rate) / static_cast<double>(nfft);

  filters.resize(bins);
  center_hz.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    center_hz[b] = mid;
    Filter& flt = filters[b];
    std::vector<double> w;
    std::size_t first = half;
    for (std::size_t k = 0; k < half; ++k) {
      const double f = k * hz_per_bin;
      double wk = 0.0;
      if (f > lo && f < mid) wk = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi) wk = (hi - f) / (hi - mid);
      if (wk > 0.0) {
        if (first == half) first = k;
        w.push_back(wk);
      } else if (first != half) {
        break;  // triangles are contiguous in frequency
      }
    }
    flt.first = first == half ? 0 : first;
    flt.weights = std::move(w);
  }
}

double MelFilterbank::apply(std::size_t band, const double* spectrum) const {
  const Filter& flt = filters[band];
  if (flt.weights.empty()) return 0.0;
  return kern::dot(flt.weights.data(), spectrum + flt.first, flt.weights.size());
}

FeatureMatrix extract_features(const signal::Waveform& w, double frame_ms,
                               double hop_ms, std::size_t n_bins,
                               double fmin_hz, double fmax_hz) {
  if (w.sample_rate <= 0) throw std::invalid_argument("extract_features: bad sample rate");
  const auto frame_len = static_cast<std::size_t>(
      std::llround(frame_ms * w.sample_rate / 1000.0));
  const auto hop = static_cast<std::size_t>(
      std::llround(hop_ms * w.sample_rate / 1000.0));
  if (frame_len == 0 || hop == 0)
    throw std::invalid_argument("extract_features: frame or hop rounds to zero samples");
  if (w.samples.size() < frame_len)
    throw std::invalid_argument("extract_features: waveform shorter than one frame");

  const std::size_t nfft = next_pow2(frame_len);
  const std::size_t half = nfft / 2 + 1;
  const std::size_t t_frames = (w.samples.size() - frame_len) / hop + 1;

  std::vector<double> window(frame_len);
  for (std::size_t i = 0; i < frame_len; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                     static_cast<double>(frame_len));

  const MelFilterbank fb(n_bins, nfft, w.sample_rate, fmin_hz, fmax_hz);
  const kern::Fft fft(nfft);

  FeatureMatrix out;
  out.t = t_frames;
  out.f = n_bins;
  out.frame_ms = frame_ms;
  out.hop_ms = hop_ms;
  out.v.resize(t_frames * n_bins);

  std::vector<double> re(nfft), im(nfft), mag(half);
  for (std::size_t ti = 0; ti < t_frames; ++ti) {
    const double* src = w.samples.data() + ti * hop;
    kern::mul(src, window.data(), re.data(), frame_len);
    std::fill(re.begin() + static_cast<std::ptrdiff_t>(frame_len), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    fft.forward(re.data(), im.data());
    kern::magnitude(re.data(), im.data(), mag.data(), half);
    double* row = out.row(ti);
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double e = fb.apply(b, mag.data());
      row[b] = std::log(e > kLogFloor ? e : kLogFloor);
    }
  }
  return out;
}

FeatureMatrix mean_normalize(const FeatureMatrix& m) {
  if (m.t == 0 || m.f == 0)
    throw std::invalid_argument("mean_normalize: empty feature matrix");
  FeatureMatrix out = m;
  std::vector<double> mean(m.f, 0.0);
  for (std::size_t ti = 0; ti < m.t; ++ti)
    kern::axpy(1.0, m.row(ti), mean.data(), m.f);
  kern::scale(1.0 / static_cast<double>(m.t), mean.data(), m.f);
  for (std::size_t ti = 0; ti < m.t; ++ti)
    kern::axpy(-1.0, mean.data(), out.row(ti), m.f);
  return out;
}

FeatureMatrix spec_augment(const FeatureMatrix& m, std::size_t max_freq_mask,
                           std::size_t max_time_mask, std::uint64_t seed) {
  if (m.t == 0 || m.f == 0)
    throw std::invalid_argument("spec_augment: empty feature matrix");
  if (max_freq_mask > m.f || max_time_mask > m.t)
    throw std::invalid_argument("spec_augment: mask bound exceeds matrix extent");

  Rng rng(seed);
  const std::size_t wf = static_cast<std::size_t>(rng.uniform_int(max_freq_mask + 1));
  const std::size_t f0 = static_cast<std::size_t>(rng.uniform_int(m.f - wf + 1));
  const std::size_t wt = static_cast<std::size_t>(rng.uniform_int(max_time_mask + 1));
  const std::size_t t0 = static_cast<std::size_t>(rng.uniform_int(m.t - wt + 1));

  const double fill =
      kern::sum(m.v.data(), m.v.size()) / static_cast<double>(m.v.size());

  FeatureMatrix out = m;
  for (std::size_t ti = 0; ti < m.t; ++ti)
    for (std::size_t fi = f0; fi < f0 + wf; ++fi) out.at(ti, fi) = fill;
  for (std::size_t ti = t0; ti < t0 + wt; ++ti)
    for (std::size_t fi = 0; fi < m.f; ++fi) out.at(ti, fi) = fill;
  return out;
}

}  // namespace svmix::feat
