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

#include "svmix/mixup.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "svmix/kernels.hpp"
#include "svmix/rng.hpp"

namespace svmix::mix {

signal::Waveform energy_normalize(const signal::Waveform& w) {
  if (w.samples.empty()) throw std::invalid_argument("energy_normalize: empty waveform");
  const double norm = std::sqrt(kern::sumsq(w.samples.data(), w.samples.size()));
  if (norm == 0.0) throw std::domain_error("energy_normalize: zero-energy waveform");
  signal::Waveform out = w;
  kern::scale(1.0 / norm, out.samples.data(), out.samples.size());
  return out;
}

signal::Waveform mix_waveforms(const signal::Waveform& a,
                               const signal::Waveform& b, double lambda) {
  if (a.samples.size() != b.samples.size() || a.sample_rate != b.sample_rate)
    throw std::invalid_argument("mix_waveforms: shape or sample-rate mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("mix_waveforms: lambda outside [0, 1]");
  const signal::Waveform na = energy_normalize(a);
  const signal::Waveform nb = energy_normalize(b);
  signal::Waveform out;
  out.sample_rate = a.sample_rate;
  out.samples.resize(a.samples.size());
  kern::axpby(lambda, na.samples.data(), 1.0 - lambda, nb.samples.data(),
              out.samples.data(), out.samples.size());
  return out;
}

SoftLabel mix_labels(int a, int b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("mix_labels: lambda outside [0, 1]");
  if (a == b) return SoftLabel::single(a);
  if (lambda == 1.0) return SoftLabel::single(a);
  if (lambda == 0.0) return SoftLabel::single(b);
  SoftLabel l;
  l.entries[0] = {a, lambda};
  l.entries[1] = {b, 1.0 - lambda};
  l.count = 2;
  return l;
}

double sample_lambda(const BetaParams& params, std::uint64_t seed) {
  if (!(params.alpha > 0.0) || !(params.beta > 0.0))
    throw std::invalid_argument("sample_lambda: Beta parameters must be positive");
  return Rng(seed).beta(params.alpha, params.beta);
}

std::vector<MixupDraw> batch_mixup_plan(std::size_t batch_size,
                                        const BetaParams& params,
                                        std::uint64_t seed) {
  if (batch_size < 2)
    throw std::invalid_argument("batch_mixup_plan: batch must have at least two elements");
  if (!(params.alpha > 0.0) || !(params.beta > 0.0))
    throw std::invalid_argument("batch_mixup_plan: Beta parameters must be positive");

  const Rng base(seed);
  Rng perm_rng = base.child(1);

  std::vector<std::size_t> partner(batch_size);
  // rejection over permutations keeps the accepted one uniform over
  // derangements; the fallback rotation is unreachable in practice
  bool ok = false;
  for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
    std::iota(partner.begin(), partner.end(), 0);
    for (std::size_t i = batch_size - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(perm_rng.uniform_int(i + 1));
      std::swap(partner[i], partner[j]);
    }
    ok = true;
    for (std::size_t i = 0; i < batch_size; ++i)
      if (partner[i] == i) { ok = false; break; }
  }
  if (!ok)
    for (std::size_t i = 0; i < batch_size; ++i) partner[i] = (i + 1) % batch_size;

  std::vector<MixupDraw> plan(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    plan[i].partner = partner[i];
    plan[i].lambda = base.child(2, i).beta(params.alpha, params.beta);
  }
  return plan;
}

signal::Waveform snr_mix(const signal::Waveform& target,
                         const signal::Waveform& interferer, double snr_db) {
  if (target.samples.empty() || interferer.samples.empty())
    throw std::invalid_argument("snr_mix: empty waveform");
  if (target.sample_rate != interferer.sample_rate)
    throw std::invalid_argument("snr_mix: sample-rate mismatch");

  const std::size_t n = target.samples.size();
  const std::size_t ni = interferer.samples.size();

  std::vector<double> aligned(n);
  for (std::size_t i = 0; i < n; ++i) aligned[i] = interferer.samples[i % ni];

  const double p_t = kern::sumsq(target.samples.data(), n) / static_cast<double>(n);
  const double p_i = kern::sumsq(aligned.data(), n) / static_cast<double>(n);
  if (p_t == 0.0 || p_i == 0.0)
    throw std::domain_error("snr_mix: zero-energy waveform");

  const double gain = std::sqrt(p_t / (p_i * std::pow(10.0, snr_db / 10.0)));

  signal::Waveform out;
  out.sample_rate = target.sample_rate;
  out.samples = target.samples;
  kern::axpy(gain, aligned.data(), out.samples.data(), n);
  return out;
}

}  // namespace svmix::mix
