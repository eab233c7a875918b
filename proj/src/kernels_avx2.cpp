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

// AVX2/FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; callers reach it through the runtime dispatch table, so the
// rest of the binary stays runnable on baseline x86-64.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "svmix/kernels.hpp"

namespace svmix::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s2 = _mm_add_pd(lo, hi);
  const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
  return _mm_cvtsd_f64(s1);
}

}  // namespace

void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xa = _mm256_loadu_pd(a + i);
    const __m256d xb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, xa, _mm256_mul_pd(vb, xb)));
  }
  for (; i < n; ++i) y[i] = alpha * a[i] + beta * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, vx, vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void mul(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] * b[i];
}

void magnitude(const double* re, const double* im, double* mag,
               std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vr = _mm256_loadu_pd(re + i);
    const __m256d vi = _mm256_loadu_pd(im + i);
    const __m256d s = _mm256_fmadd_pd(vr, vr, _mm256_mul_pd(vi, vi));
    _mm256_storeu_pd(mag + i, _mm256_sqrt_pd(s));
  }
  for (; i < n; ++i) mag[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  double r = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double sumsq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

double sumsq_centered(const double* x, std::size_t n, double mu) {
  const __m256d vmu = _mm256_set1_pd(mu);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vmu);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
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
    const __m256d va = _mm256_set1_pd(a[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d vg = _mm256_loadu_pd(grow + c);
      _mm256_storeu_pd(grow + c,
                       _mm256_fmadd_pd(va, _mm256_loadu_pd(x + c), vg));
    }
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
    for (; j + 4 <= half; j += 4) {
      const __m256d wr = _mm256_loadu_pd(tw_re + j);
      const __m256d wi = _mm256_loadu_pd(tw_im + j);
      const __m256d vr = _mm256_loadu_pd(rev + j);
      const __m256d vi = _mm256_loadu_pd(imv + j);
      const __m256d ur = _mm256_loadu_pd(reu + j);
      const __m256d ui = _mm256_loadu_pd(imu + j);
      // t = w * v (complex)
      const __m256d tr = _mm256_fmsub_pd(wr, vr, _mm256_mul_pd(wi, vi));
      const __m256d ti = _mm256_fmadd_pd(wr, vi, _mm256_mul_pd(wi, vr));
      _mm256_storeu_pd(rev + j, _mm256_sub_pd(ur, tr));
      _mm256_storeu_pd(imv + j, _mm256_sub_pd(ui, ti));
      _mm256_storeu_pd(reu + j, _mm256_add_pd(ur, tr));
      _mm256_storeu_pd(imu + j, _mm256_add_pd(ui, ti));
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

}  // namespace svmix::kern::avx2

#endif  // x86-64
