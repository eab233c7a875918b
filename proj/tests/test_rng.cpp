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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "svmix/rng.hpp"

using svmix::Rng;

TEST_CASE("rng determinism and seed sensitivity") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t va = a.next_u64();
    if (va != b.next_u64()) all_equal = false;
    if (va != c.next_u64()) any_diff = true;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("child streams ignore parent draw position") {
  Rng a(7), b(7);
  for (int i = 0; i < 10; ++i) a.uniform();
  CHECK(a.child_seed(3, 1) == b.child_seed(3, 1));
  CHECK(a.child_seed(3, 1) != b.child_seed(3, 2));
  CHECK(a.child_seed(3) != b.child_seed(4));
  Rng ca = a.child(5, 2, 9);
  Rng cb = b.child(5, 2, 9);
  for (int i = 0; i < 16; ++i) CHECK(ca.next_u64() == cb.next_u64());
}

TEST_CASE("uniform bounds and moments") {
  Rng r(1);
  const int n = 50000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    s += u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.02));

  for (int i = 0; i < 1000; ++i) {
    double v = r.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("uniform_int is unbiased over small ranges") {
  Rng r(2);
  CHECK(r.uniform_int(1) == 0);
  const std::uint64_t k = 7;
  std::vector<int> counts(k, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_int(k)];
  for (std::uint64_t j = 0; j < k; ++j)
    CHECK(counts[j] == doctest::Approx(n / double(k)).epsilon(0.05));
}

TEST_CASE("normal moments") {
  Rng r(3);
  const int n = 50000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = r.normal();
    s += z;
    s2 += z * z;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).epsilon(1).scale(0.02));
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("gamma moments") {
  Rng r(4);
  const int n = 100000;
  for (double shape : {0.5, 2.0}) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double g = r.gamma(shape);
      CHECK(g >= 0.0);
      s += g;
      s2 += g * g;
    }
    double mean = s / n;
    double var = s2 / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.03));
    CHECK(var == doctest::Approx(shape).epsilon(0.08));
  }
}

TEST_CASE("beta moments match closed form") {
  Rng r(5);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  int mid = 0;
  for (int i = 0; i < n; ++i) {
    double x = r.beta(0.2, 0.2);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    s += x;
    s2 += x * x;
    if (x > 0.4 && x < 0.6) ++mid;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  // Beta(0.2, 0.2): mean 1/2, variance ab/((a+b)^2 (a+b+1)) = 0.17857...
  CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
  CHECK(var == doctest::Approx(0.17857).epsilon(0.03));
  // U-shaped density: little mass near the center
  CHECK(mid / double(n) < 0.1);

  double su = 0.0;
  for (int i = 0; i < n; ++i) su += r.beta(1.0, 1.0);
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("hash_combine and mix64 are stable and spread") {
  CHECK(svmix::mix64(0) == svmix::mix64(0));
  CHECK(svmix::mix64(1) != svmix::mix64(2));
  std::uint64_t h1 = svmix::hash_combine(svmix::hash_combine(9, 1), 2);
  std::uint64_t h2 = svmix::hash_combine(svmix::hash_combine(9, 2), 1);
  CHECK(h1 != h2);
}
