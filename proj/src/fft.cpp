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

#include "svmix/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "svmix/kernels.hpp"

namespace svmix::kern {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (!is_pow2(n)) throw std::invalid_argument("Fft: size must be a power of two");
  bitrev_.resize(n);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  tw_re_.resize(log2n);
  tw_im_.resize(log2n);
  for (std::size_t s = 0; s < log2n; ++s) {
    const std::size_t half = std::size_t{1} << s;
    tw_re_[s].resize(half);
    tw_im_[s].resize(half);
    for (std::size_t j = 0; j < half; ++j) {
      const double ang = -kTwoPi * static_cast<double>(j) /
                         static_cast<double>(2 * half);
      tw_re_[s][j] = std::cos(ang);
      tw_im_[s][j] = std::sin(ang);
    }
  }
}

void Fft::forward(double* re, double* im) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bitrev_[i];
    if (j > i) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t s = 0; s < tw_re_.size(); ++s) {
    const std::size_t half = std::size_t{1} << s;
    fft_stage(re, im, n_, half, tw_re_[s].data(), tw_im_[s].data());
  }
}

}  // namespace svmix::kern
