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

#ifndef SVMIX_FFT_HPP
#define SVMIX_FFT_HPP

#include <cstddef>
#include <vector>

namespace svmix::kern {

// Iterative radix-2 decimation-in-time FFT over split-complex buffers.
// The plan owns the bit-reversal permutation and per-stage twiddle tables;
// forward() runs the butterfly passes through the dispatched fft_pass
// kernel. Sizes must be powers of two.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }

  // In-place forward transform (engineering sign convention, e^{-i2pikn/N}).
  void forward(double* re, double* im) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  // stage s (half = 2^s) uses twiddles_[s], a table of `half` complex values.
  std::vector<std::vector<double>> tw_re_;
  std::vector<std::vector<double>> tw_im_;
};

}  // namespace svmix::kern

#endif  // SVMIX_FFT_HPP
