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
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "svmix/loss.hpp"
#include "svmix/rng.hpp"

using namespace svmix;
using loss::ClassCenters;
using loss::MarginConfig;

namespace {

Embedding rand_emb(Rng& r, std::size_t d) {
  Embedding e(d);
  for (double& x : e) x = r.uniform(-1, 1);
  return e;
}

ClassCenters rand_centers(Rng& r, std::size_t d, std::size_t n) {
  ClassCenters w(d, n);
  for (double& x : w.w) x = r.uniform(-1, 1);
  return w;
}

// Independent slow-path evaluation: arccos round-trip instead of the
// cos-addition identity, plain softmax over explicit logits.
double naive_loss(const Embedding& e, const ClassCenters& w, std::size_t a,
                  std::size_t b, double lambda, const MarginConfig& cfg) {
  const std::size_t n = w.n_classes, d = w.dim;
  double ne = 0;
  for (double x : e) ne += x * x;
  ne = std::sqrt(ne);
  std::vector<double> theta(n);
  for (std::size_t j = 0; j < n; ++j) {
    double nw = 0, dp = 0;
    for (std::size_t k = 0; k < d; ++k) {
      nw += w.w[j * d + k] * w.w[j * d + k];
      dp += w.w[j * d + k] * e[k];
    }
    double c = dp / (ne * std::sqrt(nw));
    c = std::min(std::max(c, -1.0 + 1e-7), 1.0 - 1e-7);
    theta[j] = std::acos(c);
  }
  if (a == b)
    theta[a] += cfg.margin;
  else {
    theta[a] += lambda * cfg.margin;
    theta[b] += (1.0 - lambda) * cfg.margin;
  }
  std::vector<double> logits(n);
  for (std::size_t j = 0; j < n; ++j) logits[j] = cfg.scale * std::cos(theta[j]);
  double mx = logits[0];
  for (double l : logits) mx = std::max(mx, l);
  double z = 0;
  for (double l : logits) z += std::exp(l - mx);
  double lse = mx + std::log(z);
  double la = logits[a] - lse;
  double lb = logits[b] - lse;
  if (a == b) return -la;
  return -(lambda * la + (1.0 - lambda) * lb);
}

// Textbook single-target AAM-softmax, written without reference to the
// mixup code path.
double plain_aam(const Embedding& e, const ClassCenters& w, std::size_t a,
                 const MarginConfig& cfg) {
  const std::size_t n = w.n_classes, d = w.dim;
  double ne = 0;
  for (double x : e) ne += x * x;
  ne = std::sqrt(ne);
  std::vector<double> cosv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double nw = 0, dp = 0;
    for (std::size_t k = 0; k < d; ++k) {
      nw += w.w[j * d + k] * w.w[j * d + k];
      dp += w.w[j * d + k] * e[k];
    }
    double c = dp / (ne * std::sqrt(nw));
    cosv[j] = std::min(std::max(c, -1.0 + 1e-7), 1.0 - 1e-7);
  }
  double ca = cosv[a];
  double target = ca * std::cos(cfg.margin) -
                  std::sqrt(1.0 - ca * ca) * std::sin(cfg.margin);
  double mx = cfg.scale * target;
  for (std::size_t j = 0; j < n; ++j)
    if (j != a) mx = std::max(mx, cfg.scale * cosv[j]);
  double z = std::exp(cfg.scale * target - mx);
  for (std::size_t j = 0; j < n; ++j)
    if (j != a) z += std::exp(cfg.scale * cosv[j] - mx);
  return -(cfg.scale * target - mx - std::log(z));
}

}  // namespace

TEST_CASE("cosines_and_angles hand cases") {
  ClassCenters w(2, 3);
  double* c0 = w.center(0);
  c0[0] = 2.0;
  c0[1] = 0.0;  // parallel to e
  double* c1 = w.center(1);
  c1[0] = 0.0;
  c1[1] = -3.0;  // orthogonal
  double* c2 = w.center(2);
  c2[0] = 1.0;
  c2[1] = 1.0;  // 45 degrees
  Embedding e{1.0, 0.0};
  std::vector<double> cosv, theta;
  loss::cosines_and_angles(e, w, cosv, theta);
  CHECK(cosv[0] >= 1.0 - 1e-6);
  CHECK(theta[0] <= 1e-3);
  CHECK(theta[1] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
  CHECK(cosv[2] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(theta[2] == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
}

TEST_CASE("cosines_and_angles rejects zero norms") {
  ClassCenters w(2, 1);
  w.center(0)[0] = 1.0;
  Embedding z{0.0, 0.0};
  std::vector<double> c, t;
  CHECK_THROWS_AS(loss::cosines_and_angles(z, w, c, t), std::domain_error);
  ClassCenters wz(2, 1);
  Embedding e{1.0, 0.0};
  CHECK_THROWS_AS(loss::cosines_and_angles(e, wz, c, t), std::domain_error);
}

TEST_CASE("cosines scale invariance") {
  Rng r(81);
  ClassCenters w = rand_centers(r, 4, 6);
  Embedding e = rand_emb(r, 4);
  std::vector<double> c1, t1, c2, t2;
  loss::cosines_and_angles(e, w, c1, t1);
  Embedding e2 = e;
  for (double& x : e2) x *= 37.5;
  loss::cosines_and_angles(e2, w, c2, t2);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(std::abs(c1[j] - c2[j]) <= 1e-9);
    CHECK(std::abs(t1[j] - t2[j]) <= 1e-9);
  }
}

TEST_CASE("apply_mixed_margin examples") {
  std::vector<double> theta{0.5, 1.0, 1.5};

  auto full = loss::apply_mixed_margin(theta, 0, 1, 1.0, 0.2);
  CHECK(full[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(full[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(full[2] == doctest::Approx(1.5).epsilon(1e-12));

  auto half = loss::apply_mixed_margin(theta, 0, 1, 0.5, 0.2);
  CHECK(half[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(half[1] == doctest::Approx(1.1).epsilon(1e-12));

  auto zero = loss::apply_mixed_margin(theta, 0, 1, 0.3, 0.0);
  CHECK(zero == theta);

  auto same = loss::apply_mixed_margin(theta, 2, 2, 0.3, 0.2);
  CHECK(same[2] == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(same[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hand-evaluated two-class loss") {
  // s=1, m=0, e aligned with class 0: value = log(1 + exp(-1))
  ClassCenters w(2, 2);
  w.center(0)[0] = 1.0;
  w.center(1)[1] = 1.0;
  Embedding e{1.0, 0.0};
  MarginConfig cfg{0.0, 1.0};
  loss::LossOutput out = loss::margin_mixup_loss(e, w, 0, 1, 1.0, cfg);
  CHECK(out.value == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-6));
}

TEST_CASE("matches the naive arccos-route evaluation") {
  Rng r(82);
  for (int i = 0; i < 200; ++i) {
    std::size_t d = 4, n = 5;
    Embedding e = rand_emb(r, d);
    ClassCenters w = rand_centers(r, d, n);
    std::size_t a = r.uniform_int(n), b = r.uniform_int(n);
    double lam = r.uniform();
    MarginConfig cfg{r.uniform(0.0, 0.5), r.uniform(1.0, 32.0)};
    loss::LossOutput out = loss::margin_mixup_loss(e, w, a, b, lam, cfg);
    double want = naive_loss(e, w, a, b, lam, cfg);
    CHECK(out.value == doctest::Approx(want).epsilon(1e-9));
    CHECK(out.value >= 0.0);
  }
}

TEST_CASE("lambda=1 reduces to plain aam-softmax") {
  Rng r(83);
  for (int i = 0; i < 100; ++i) {
    std::size_t d = 3 + r.uniform_int(6), n = 2 + r.uniform_int(9);
    Embedding e = rand_emb(r, d);
    ClassCenters w = rand_centers(r, d, n);
    std::size_t a = r.uniform_int(n), b = r.uniform_int(n);
    MarginConfig cfg{r.uniform(0.0, 0.5), r.uniform(1.0, 32.0)};
    loss::LossOutput out = loss::margin_mixup_loss(e, w, a, b, 1.0, cfg);
    CHECK(std::abs(out.value - plain_aam(e, w, a, cfg)) <= 1e-12);
  }
}

TEST_CASE("symmetry in (a, b, lambda)") {
  Rng r(84);
  for (int i = 0; i < 100; ++i) {
    std::size_t d = 4, n = 7;
    Embedding e = rand_emb(r, d);
    ClassCenters w = rand_centers(r, d, n);
    std::size_t a = r.uniform_int(n), b = r.uniform_int(n);
    double lam = r.uniform();
    MarginConfig cfg{0.2, 30.0};
    loss::LossOutput ab = loss::margin_mixup_loss(e, w, a, b, lam, cfg);
    loss::LossOutput ba = loss::margin_mixup_loss(e, w, b, a, 1.0 - lam, cfg);
    CHECK(std::abs(ab.value - ba.value) <= 1e-12);
    for (std::size_t k = 0; k < d; ++k)
      CHECK(std::abs(ab.grad_e[k] - ba.grad_e[k]) <= 1e-10);
  }
}

TEST_CASE("loss is monotone in the margin at lambda=1") {
  Rng r(85);
  for (int i = 0; i < 30; ++i) {
    std::size_t d = 4, n = 6;
    Embedding e = rand_emb(r, d);
    ClassCenters w = rand_centers(r, d, n);
    // make a the best-scoring class
    std::vector<double> cosv, theta;
    loss::cosines_and_angles(e, w, cosv, theta);
    std::size_t a = 0;
    for (std::size_t j = 1; j < n; ++j)
      if (cosv[j] > cosv[a]) a = j;
    double prev = -1.0;
    for (double m : {0.0, 0.1, 0.2, 0.3, 0.5}) {
      MarginConfig cfg{m, 30.0};
      double v = loss::margin_mixup_loss(e, w, a, a, 1.0, cfg).value;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("analytic gradients match finite differences") {
  Rng r(86);
  const double h = 1e-6;
  double max_rel = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    std::size_t d = 2 + r.uniform_int(7),
                n = 2 + r.uniform_int(9);
    Embedding e = rand_emb(r, d);
    ClassCenters w = rand_centers(r, d, n);
    std::size_t a = r.uniform_int(n), b = r.uniform_int(n);
    double lams[3] = {0.0, 0.3, 1.0};
    double lam = lams[inst % 3];
    MarginConfig cfg{(inst % 2) ? 0.2 : 0.0, r.uniform(1.0, 32.0)};

    loss::LossOutput out = loss::margin_mixup_loss(e, w, a, b, lam, cfg);

    for (std::size_t k = 0; k < d; ++k) {
      Embedding ep = e, em = e;
      ep[k] += h;
      em[k] -= h;
      double fd = (loss::margin_mixup_loss(ep, w, a, b, lam, cfg).value -
                   loss::margin_mixup_loss(em, w, a, b, lam, cfg).value) /
                  (2 * h);
      double rel = std::abs(out.grad_e[k] - fd) /
                   std::max(1.0, std::abs(fd));
      max_rel = std::max(max_rel, rel);
    }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        ClassCenters wp = w, wm = w;
        wp.w[j * d + k] += h;
        wm.w[j * d + k] -= h;
        double fd = (loss::margin_mixup_loss(e, wp, a, b, lam, cfg).value -
                     loss::margin_mixup_loss(e, wm, a, b, lam, cfg).value) /
                    (2 * h);
        double rel = std::abs(out.grad_w[j * d + k] - fd) /
                     std::max(1.0, std::abs(fd));
        max_rel = std::max(max_rel, rel);
      }
  }
  CHECK(max_rel < 1e-5);
}

TEST_CASE("batch_loss reduces to the element loss") {
  Rng r(87);
  std::size_t d = 4, n = 5;
  ClassCenters w = rand_centers(r, d, n);
  MarginConfig cfg{0.2, 30.0};

  Embedding e = rand_emb(r, d);
  mix::SoftLabel l = mix::mix_labels(1, 3, 0.7);
  auto single = loss::batch_loss({e}, w, {l}, cfg);
  auto direct = loss::margin_mixup_loss(e, w, 1, 3, 0.7, cfg);
  CHECK(single.value == doctest::Approx(direct.value).epsilon(1e-12));
  for (std::size_t k = 0; k < d; ++k)
    CHECK(single.grad_embeddings[0][k] ==
          doctest::Approx(direct.grad_e[k]).epsilon(1e-12));
  for (std::size_t k = 0; k < d * n; ++k)
    CHECK(single.grad_w[k] == doctest::Approx(direct.grad_w[k]).epsilon(1e-12));

  auto dup = loss::batch_loss({e, e}, w, {l, l}, cfg);
  CHECK(dup.value == doctest::Approx(direct.value).epsilon(1e-12));

  Embedding e2 = rand_emb(r, d), e3 = rand_emb(r, d);
  mix::SoftLabel l2 = mix::SoftLabel::single(0);
  mix::SoftLabel l3 = mix::mix_labels(2, 4, 0.25);
  auto batch = loss::batch_loss({e, e2, e3}, w, {l, l2, l3}, cfg);
  double want = (direct.value + loss::margin_mixup_loss(e2, w, 0, 0, 1.0, cfg).value +
                 loss::margin_mixup_loss(e3, w, 2, 4, 0.25, cfg).value) /
                3.0;
  CHECK(batch.value == doctest::Approx(want).epsilon(1e-12));

  CHECK_THROWS_AS(loss::batch_loss({}, w, {}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(loss::batch_loss({e, e2}, w, {l}, cfg),
                  std::invalid_argument);
}

TEST_CASE("lambda override flags") {
  Rng r(88);
  std::size_t d = 4, n = 6;
  ClassCenters w = rand_centers(r, d, n);
  Embedding e = rand_emb(r, d);
  MarginConfig cfg{0.2, 30.0};
  double lam = 0.35;
  mix::SoftLabel l = mix::mix_labels(1, 4, lam);

  auto base = loss::batch_loss({e}, w, {l}, cfg, {});
  CHECK(base.value ==
        doctest::Approx(loss::margin_mixup_loss_ex(e, w, 1, 4, lam, lam, cfg).value)
            .epsilon(1e-12));

  auto ma = loss::batch_loss({e}, w, {l}, cfg, {true, false});
  CHECK(ma.value ==
        doctest::Approx(loss::margin_mixup_loss_ex(e, w, 1, 4, 1.0, lam, cfg).value)
            .epsilon(1e-12));

  auto mb = loss::batch_loss({e}, w, {l}, cfg, {false, true});
  CHECK(mb.value ==
        doctest::Approx(loss::margin_mixup_loss_ex(e, w, 1, 4, lam, 1.0, cfg).value)
            .epsilon(1e-12));

  // both overrides: exactly the plain single-target loss on speaker a
  auto mc = loss::batch_loss({e}, w, {l}, cfg, {true, true});
  auto plain = loss::batch_loss({e}, w, {mix::SoftLabel::single(1)}, cfg, {});
  CHECK(mc.value == doctest::Approx(plain.value).epsilon(1e-12));
}

TEST_CASE("loss value is non-negative") {
  Rng r(89);
  for (int i = 0; i < 300; ++i) {
    std::size_t d = 2 + r.uniform_int(6), n = 2 + r.uniform_int(8);
    Embedding e = rand_emb(r, d);
    ClassCenters w = rand_centers(r, d, n);
    MarginConfig cfg{r.uniform(0.0, 0.5), r.uniform(0.5, 40.0)};
    double v = loss::margin_mixup_loss(e, w, r.uniform_int(n), r.uniform_int(n),
                                       r.uniform(), cfg)
                   .value;
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
}
