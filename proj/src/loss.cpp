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

#include "svmix/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svmix/kernels.hpp"

namespace svmix::loss {

namespace {

constexpr double kCosClamp = 1.0 - 1e-7;

void check_inputs(const Embedding& e, const ClassCenters& w, std::size_t a,
                  std::size_t b, double lambda) {
  if (e.size() != w.dim)
    throw std::invalid_argument("loss: embedding size does not match centers");
  if (w.n_classes == 0) throw std::invalid_argument("loss: no classes");
  if (a >= w.n_classes || b >= w.n_classes)
    throw std::invalid_argument("loss: class index out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("loss: lambda outside [0, 1]");
}

}  // namespace

void cosines_and_angles(const Embedding& e, const ClassCenters& w,
                        std::vector<double>& cos_out,
                        std::vector<double>& theta_out) {
  if (e.size() != w.dim)
    throw std::invalid_argument("cosines_and_angles: shape mismatch");
  const double ne = std::sqrt(kern::sumsq(e.data(), e.size()));
  if (ne == 0.0) throw std::domain_error("cosines_and_angles: zero-norm embedding");

  cos_out.resize(w.n_classes);
  theta_out.resize(w.n_classes);
  for (std::size_t j = 0; j < w.n_classes; ++j) {
    const double nw = std::sqrt(kern::sumsq(w.center(j), w.dim));
    if (nw == 0.0) throw std::domain_error("cosines_and_angles: zero-norm class center");
    double c = kern::dot(e.data(), w.center(j), w.dim) / (ne * nw);
    c = std::clamp(c, -kCosClamp, kCosClamp);
    cos_out[j] = c;
    theta_out[j] = std::acos(c);
  }
}

std::vector<double> apply_mixed_margin(const std::vector<double>& theta,
                                       std::size_t a, std::size_t b,
                                       double lambda, double m) {
  if (a >= theta.size() || b >= theta.size())
    throw std::invalid_argument("apply_mixed_margin: class index out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("apply_mixed_margin: lambda outside [0, 1]");
  std::vector<double> out = theta;
  out[a] += lambda * m;
  out[b] += (1.0 - lambda) * m;
  return out;
}

LossOutput margin_mixup_loss_ex(const Embedding& e, const ClassCenters& w,
                                std::size_t a, std::size_t b,
                                double lambda_margin, double lambda_loss,
                                const MarginConfig& cfg) {
  check_inputs(e, w, a, b, lambda_margin);
  check_inputs(e, w, a, b, lambda_loss);
  if (cfg.margin < 0.0 || !(cfg.scale > 0.0))
    throw std::invalid_argument("loss: bad margin configuration");

  const std::size_t n = w.n_classes;
  const std::size_t d = w.dim;
  const double s = cfg.scale;

  const double ne = std::sqrt(kern::sumsq(e.data(), d));
  if (ne == 0.0) throw std::domain_error("loss: zero-norm embedding");
  std::vector<double> wnorm(n);
  std::vector<double> cosr(n);
  for (std::size_t j = 0; j < n; ++j) {
    wnorm[j] = std::sqrt(kern::sumsq(w.center(j), d));
    if (wnorm[j] == 0.0) throw std::domain_error("loss: zero-norm class center");
    cosr[j] = std::clamp(kern::dot(e.data(), w.center(j), d) / (ne * wnorm[j]),
                         -kCosClamp, kCosClamp);
  }

  // margin offsets; a == b accumulates the full m
  std::vector<double> delta(n, 0.0);
  delta[a] += lambda_margin * cfg.margin;
  delta[b] += (1.0 - lambda_margin) * cfg.margin;

  std::vector<double> logits(n);
  std::vector<double> kfac(n, 1.0);  // d cos(theta+delta) / d cos(theta)
  for (std::size_t j = 0; j < n; ++j) {
    if (delta[j] != 0.0) {
      const double sinr = std::sqrt(1.0 - cosr[j] * cosr[j]);
      const double cd = std::cos(delta[j]);
      const double sd = std::sin(delta[j]);
      logits[j] = s * (cosr[j] * cd - sinr * sd);
      kfac[j] = cd + cosr[j] * sd / sinr;
    } else {
      logits[j] = s * cosr[j];
    }
  }

  const double zmax = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) denom += std::exp(logits[j] - zmax);
  const double lse = zmax + std::log(denom);

  std::vector<double> coef(n, 0.0);
  coef[a] += lambda_loss;
  coef[b] += 1.0 - lambda_loss;

  LossOutput out;
  out.value = lse - lambda_loss * logits[a] - (1.0 - lambda_loss) * logits[b];

  // c_j = dL/dcos_j = s * (softmax_j - coef_j) * kfac_j
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j)
    c[j] = s * (std::exp(logits[j] - zmax) / denom - coef[j]) * kfac[j];

  out.grad_e.assign(d, 0.0);
  out.grad_w.assign(n * d, 0.0);
  double radial = 0.0;  // sum_j c_j cos_j, the e-direction component
  for (std::size_t j = 0; j < n; ++j) {
    kern::axpy(c[j] / wnorm[j], w.center(j), out.grad_e.data(), d);
    radial += c[j] * cosr[j];

    double* gw = out.grad_w.data() + j * d;
    kern::axpy(c[j] / (ne * wnorm[j]), e.data(), gw, d);
    kern::axpy(-c[j] * cosr[j] / (wnorm[j] * wnorm[j]), w.center(j), gw, d);
  }
  kern::scale(1.0 / ne, out.grad_e.data(), d);
  kern::axpy(-radial / (ne * ne), e.data(), out.grad_e.data(), d);
  return out;
}

LossOutput margin_mixup_loss(const Embedding& e, const ClassCenters& w,
                             std::size_t a, std::size_t b, double lambda,
                             const MarginConfig& cfg) {
  return margin_mixup_loss_ex(e, w, a, b, lambda, lambda, cfg);
}

BatchLossOutput batch_loss(const std::vector<Embedding>& embeddings,
                           const ClassCenters& w,
                           const std::vector<mix::SoftLabel>& labels,
                           const MarginConfig& cfg, const LossFlags& flags) {
  if (embeddings.empty()) throw std::invalid_argument("batch_loss: empty batch");
  if (embeddings.size() != labels.size())
    throw std::invalid_argument("batch_loss: embeddings and labels differ in length");

  const std::size_t bsz = embeddings.size();
  const double inv = 1.0 / static_cast<double>(bsz);

  BatchLossOutput out;
  out.grad_embeddings.resize(bsz);
  out.grad_w.assign(w.w.size(), 0.0);

  for (std::size_t i = 0; i < bsz; ++i) {
    const mix::SoftLabel& l = labels[i];
    if (l.count < 1 || l.count > 2)
      throw std::invalid_argument("batch_loss: soft label must have 1 or 2 entries");
    std::size_t a, b;
    double lam;
    if (l.count == 1) {
      a = b = static_cast<std::size_t>(l.entries[0].speaker_id);
      lam = 1.0;
    } else {
      a = static_cast<std::size_t>(l.entries[0].speaker_id);
      b = static_cast<std::size_t>(l.entries[1].speaker_id);
      lam = l.entries[0].weight;
    }
    const double lam_margin = flags.margin_lambda_one ? 1.0 : lam;
    const double lam_loss = flags.loss_lambda_one ? 1.0 : lam;

    LossOutput one = margin_mixup_loss_ex(embeddings[i], w, a, b, lam_margin,
                                          lam_loss, cfg);
    out.value += inv * one.value;
    kern::scale(inv, one.grad_e.data(), one.grad_e.size());
    out.grad_embeddings[i] = std::move(one.grad_e);
    kern::axpy(inv, one.grad_w.data(), out.grad_w.data(), out.grad_w.size());
  }
  return out;
}

}  // namespace svmix::loss
