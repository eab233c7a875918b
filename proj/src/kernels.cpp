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

#include "svmix/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace svmix::kern {

namespace scalar {

void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * a[i] + beta * b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void mul(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void magnitude(const double* re, const double* im, double* mag,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    mag[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double sumsq_centered(const double* x, std::size_t n, double mu) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mu;
    acc += d * d;
  }
  return acc;
}

void matvec(const double* a, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void outer_acc(const double* a, const double* x, double* g, std::size_t rows,
               std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* grow = g + r * cols;
    const double ar = a[r];
    for (std::size_t c = 0; c < cols; ++c) grow[c] += ar * x[c];
  }
}

void fft_stage(double* re, double* im, std::size_t n, std::size_t half,
               const double* tw_re, const double* tw_im) {
  for (std::size_t base = 0; base < n; base += 2 * half) {
    for (std::size_t j = 0; j < half; ++j) {
      const std::size_t u = base + j;
      const std::size_t v = u + half;
      const double tr = tw_re[j] * re[v] - tw_im[j] * im[v];
      const double ti = tw_re[j] * im[v] + tw_im[j] * re[v];
      re[v] = re[u] - tr;
      im[v] = im[u] - ti;
      re[u] += tr;
      im[u] += ti;
    }
  }
}

}  // namespace scalar

namespace {

struct Vtable {
  decltype(&scalar::axpby) axpby;
  decltype(&scalar::axpy) axpy;
  decltype(&scalar::scale) scale;
  decltype(&scalar::mul) mul;
  decltype(&scalar::magnitude) magnitude;
  decltype(&scalar::dot) dot;
  decltype(&scalar::sum) sum;
  decltype(&scalar::sumsq) sumsq;
  decltype(&scalar::sumsq_centered) sumsq_centered;
  decltype(&scalar::matvec) matvec;
  decltype(&scalar::outer_acc) outer_acc;
  decltype(&scalar::fft_stage) fft_stage;
};

constexpr Vtable kScalarVtable = {
    &scalar::axpby, &scalar::axpy,   &scalar::scale,
    &scalar::mul,   &scalar::magnitude, &scalar::dot,
    &scalar::sum,   &scalar::sumsq,  &scalar::sumsq_centered,
    &scalar::matvec, &scalar::outer_acc, &scalar::fft_stage,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2Vtable = {
    &avx2::axpby, &avx2::axpy,   &avx2::scale,
    &avx2::mul,   &avx2::magnitude, &avx2::dot,
    &avx2::sum,   &avx2::sumsq,  &avx2::sumsq_centered,
    &avx2::matvec, &avx2::outer_acc, &avx2::fft_stage,
};
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
constexpr Vtable kNeonVtable = {
    &neon::axpby, &neon::axpy,   &neon::scale,
    &neon::mul,   &neon::magnitude, &neon::dot,
    &neon::sum,   &neon::sumsq,  &neon::sumsq_centered,
    &neon::matvec, &neon::outer_acc, &neon::fft_stage,
};
#endif

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  Backend backend = Backend::scalar;
  const Vtable* vt = &kScalarVtable;
};

Dispatch make_default_dispatch() {
  Dispatch d;
#if defined(__aarch64__) || defined(__ARM_NEON)
  d.backend = Backend::neon;
  d.vt = &kNeonVtable;
#elif defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2_fma()) {
    d.backend = Backend::avx2;
    d.vt = &kAvx2Vtable;
  }
#endif
  if (const char* env = std::getenv("SVMIX_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) {
      d.backend = Backend::scalar;
      d.vt = &kScalarVtable;
    }
    // "avx2"/"neon" keep the probed default; an unsupported request falls
    // back to whatever the probe selected rather than crashing.
  }
  return d;
}

Dispatch& dispatch() {
  static Dispatch d = make_default_dispatch();
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2_fma();
    case Backend::neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw std::invalid_argument(std::string("kern: backend not supported: ") +
                                backend_name(b));
  Dispatch& d = dispatch();
  d.backend = b;
  switch (b) {
    case Backend::scalar:
      d.vt = &kScalarVtable;
      break;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      d.vt = &kAvx2Vtable;
#endif
      break;
    case Backend::neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
      d.vt = &kNeonVtable;
#endif
      break;
  }
}

void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n) {
  dispatch().vt->axpby(alpha, a, beta, b, y, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  dispatch().vt->axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) {
  dispatch().vt->scale(alpha, x, n);
}
void mul(const double* a, const double* b, double* y, std::size_t n) {
  dispatch().vt->mul(a, b, y, n);
}
void magnitude(const double* re, const double* im, double* mag,
               std::size_t n) {
  dispatch().vt->magnitude(re, im, mag, n);
}
double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().vt->dot(a, b, n);
}
double sum(const double* x, std::size_t n) { return dispatch().vt->sum(x, n); }
double sumsq(const double* x, std::size_t n) {
  return dispatch().vt->sumsq(x, n);
}
double sumsq_centered(const double* x, std::size_t n, double mu) {
  return dispatch().vt->sumsq_centered(x, n, mu);
}
void matvec(const double* a, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  dispatch().vt->matvec(a, x, y, rows, cols);
}
void outer_acc(const double* a, const double* x, double* g, std::size_t rows,
               std::size_t cols) {
  dispatch().vt->outer_acc(a, x, g, rows, cols);
}
void fft_stage(double* re, double* im, std::size_t n, std::size_t half,
               const double* tw_re, const double* tw_im) {
  dispatch().vt->fft_stage(re, im, n, half, tw_re, tw_im);
}

}  // namespace svmix::kern
