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

#ifndef SVMIX_KERNELS_HPP
#define SVMIX_KERNELS_HPP

#include <cstddef>
#include <string>

// Dense double-precision inner loops shared by the signal, loss and model
// code. Every kernel has a scalar reference implementation; on x86-64 an
// AVX2/FMA variant is selected at runtime when the CPU supports it, and on
// AArch64 a NEON variant is compiled in. The active backend can be forced
// with the SVMIX_SIMD environment variable ("scalar", "avx2", "neon") or
// programmatically via set_backend(), which the equivalence tests use.
//
// SIMD variants reassociate reductions, so results may differ from the
// scalar reference by normal floating-point accumulation error. Within one
// process the selected backend is fixed, keeping runs reproducible.

namespace svmix::kern {

enum class Backend { scalar, avx2, neon };

// Backend chosen at startup (cpuid probe + SVMIX_SIMD override).
Backend active_backend();
const char* backend_name(Backend b);

// Force a backend; throws std::invalid_argument if unsupported on this CPU.
void set_backend(Backend b);

// True if the named backend can run on this machine.
bool backend_supported(Backend b);

// y[i] = alpha*a[i] + beta*b[i]
void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n);

// y[i] += alpha*x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x[i] *= alpha
void scale(double alpha, double* x, std::size_t n);

// y[i] = a[i]*b[i]
void mul(const double* a, const double* b, double* y, std::size_t n);

// mag[i] = sqrt(re[i]^2 + im[i]^2)
void magnitude(const double* re, const double* im, double* mag, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);

// sum over i of (x[i] - mu)^2
double sumsq_centered(const double* x, std::size_t n, double mu);

// y[r] = dot(a[r*cols .. r*cols+cols), x) for each of `rows` rows
void matvec(const double* a, const double* x, double* y, std::size_t rows,
            std::size_t cols);

// g[r*cols + c] += a[r] * x[c] (rank-1 accumulate into a row-major matrix)
void outer_acc(const double* a, const double* x, double* g, std::size_t rows,
               std::size_t cols);

// One radix-2 DIT stage over split-complex data of length n: for each group
// base = g * 2 * half and each offset j in [0, half), with u = base + j,
// v = u + half,
//   t = w[j] * a[v];  a[v] = a[u] - t;  a[u] = a[u] + t.
// Called by the FFT driver once per stage.
void fft_stage(double* re, double* im, std::size_t n, std::size_t half,
               const double* tw_re, const double* tw_im);

// Reference implementations, always available (used by equivalence tests).
namespace scalar {
void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void mul(const double* a, const double* b, double* y, std::size_t n);
void magnitude(const double* re, const double* im, double* mag, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sumsq_centered(const double* x, std::size_t n, double mu);
void matvec(const double* a, const double* x, double* y, std::size_t rows,
            std::size_t cols);
void outer_acc(const double* a, const double* x, double* g, std::size_t rows,
               std::size_t cols);
void fft_stage(double* re, double* im, std::size_t n, std::size_t half,
               const double* tw_re, const double* tw_im);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void mul(const double* a, const double* b, double* y, std::size_t n);
void magnitude(const double* re, const double* im, double* mag, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sumsq_centered(const double* x, std::size_t n, double mu);
void matvec(const double* a, const double* x, double* y, std::size_t rows,
            std::size_t cols);
void outer_acc(const double* a, const double* x, double* g, std::size_t rows,
               std::size_t cols);
void fft_stage(double* re, double* im, std::size_t n, std::size_t half,
               const double* tw_re, const double* tw_im);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
namespace neon {
void axpby(double alpha, const double* a, double beta, const double* b,
           double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void mul(const double* a, const double* b, double* y, std::size_t n);
void magnitude(const double* re, const double* im, double* mag, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sumsq_centered(const double* x, std::size_t n, double mu);
void matvec(const double* a, const double* x, double* y, std::size_t rows,
            std::size_t cols);
void outer_acc(const double* a, const double* x, double* g, std::size_t rows,
               std::size_t cols);
void fft_stage(double* re, double* im, std::size_t n, std::size_t half,
               const double* tw_re, const double* tw_im);
}  // namespace neon
#endif

}  // namespace svmix::kern

#endif  // SVMIX_KERNELS_HPP
