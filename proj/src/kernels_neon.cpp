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

// NEON variants for AArch64 (2-wide double). NEON is baseline on AArch64,
// so no runtime probe is needed beyond the compile-time guard.

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "svmix/kernels.hpp"

namespace svmix::kern::neon {

void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t vb = vdupq_n_f64(beta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vmulq_f64(vb, vld1q_f64(b + i));
    r = vfmaq_f64(r, va, vld1q_f64(a + i));
    vst1q_f64(y + i, r);
  }
  for (; i < n; ++i) y[i] = alpha * a[i] + beta * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void mul(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) y[i] = a[i] * b[i];
}

void magnitude(const double* re, const double* im, double* mag,
               std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vr = vld1q_f64(re + i);
    const float64x2_t vi = vld1q_f64(im + i);
    const float64x2_t s = vfmaq_f64(vmulq_f64(vi, vi), vr, vr);
    vst1q_f64(mag + i, vsqrtq_f64(s));
  }
  for (; i < n; ++i) mag[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double sumsq(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

double sumsq_centered(const double* x, std::size_t n, double mu) {
  const float64x2_t vmu = vdupq_n_f64(mu);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vmu);
    acc = vfmaq_f64(acc, d, d);
  }
  double r = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - mu;
    r += d * d;
  }
  return r;
}

void matvec(const double* a, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void outer_acc(const double* a, const double* x, double* g, std::size_t rows,
               std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* grow = g + r * cols;
    const float64x2_t va = vdupq_n_f64(a[r]);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2)
      vst1q_f64(grow + c, vfmaq_f64(vld1q_f64(grow + c), va, vld1q_f64(x + c)));
    for (; c < cols; ++c) grow[c] += a[r] * x[c];
  }
}

void fft_stage(double* re, double* im, std::size_t n, std::size_t half,
               const double* tw_re, const double* tw_im) {
  for (std::size_t base = 0; base < n; base += 2 * half) {
    double* reu = re + base;
    double* imu = im + base;
    double* rev = reu + half;
    double* imv = imu + half;
    std::size_t j = 0;
    for (; j + 2 <= half; j += 2) {
      const float64x2_t wr = vld1q_f64(tw_re + j);
      const float64x2_t wi = vld1q_f64(tw_im + j);
      const float64x2_t vr = vld1q_f64(rev + j);
      const float64x2_t vi = vld1q_f64(imv + j);
      const float64x2_t ur = vld1q_f64(reu + j);
      const float64x2_t ui = vld1q_f64(imu + j);
      const float64x2_t tr = vfmsq_f64(vmulq_f64(wr, vr), wi, vi);
      const float64x2_t ti = vfmaq_f64(vmulq_f64(wi, vr), wr, vi);
      vst1q_f64(rev + j, vsubq_f64(ur, tr));
      vst1q_f64(imv + j, vsubq_f64(ui, ti));
      vst1q_f64(reu + j, vaddq_f64(ur, tr));
      vst1q_f64(imu + j, vaddq_f64(ui, ti));
    }
    for (; j < half; ++j) {
      const double tr = tw_re[j] * rev[j] - tw_im[j] * imv[j];
      const double ti = tw_re[j] * imv[j] + tw_im[j] * rev[j];
      rev[j] = reu[j] - tr;
      imv[j] = imu[j] - ti;
      reu[j] += tr;
      imu[j] += ti;
    }
  }
}

}  // namespace svmix::kern::neon

#endif  // AArch64 / NEON
