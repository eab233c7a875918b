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

#ifndef SVMIX_LOSS_HPP
#define SVMIX_LOSS_HPP

#include <cstddef>
#include <vector>

#include "svmix/mixup.hpp"

namespace svmix {

using Embedding = std::vector<double>;

namespace loss {

// Class centers, one row per class. Rows are stored unnormalized; the
// cosine normalizes on the fly and rows are never re-normalized after
// updates.
struct ClassCenters {
  std::size_t dim = 0;
  std::size_t n_classes = 0;
  std::vector<double> w;  // row-major [n_classes][dim]

  ClassCenters() = default;
  ClassCenters(std::size_t d, std::size_t n)
      : dim(d), n_classes(n), w(d * n, 0.0) {}

  double* center(std::size_t j) { return w.data() + j * dim; }
  const double* center(std::size_t j) const { return w.data() + j * dim; }
};

struct MarginConfig {
  double margin = 0.2;  // radians
  double scale = 30.0;
};

struct LossOutput {
  double value = 0.0;
  std::vector<double> grad_e;  // dim
  std::vector<double> grad_w;  // same layout as ClassCenters::w
};

struct BatchLossOutput {
  double value = 0.0;
  std::vector<std::vector<double>> grad_embeddings;  // d(mean loss)/d(e_i)
  std::vector<double> grad_w;                        // d(mean loss)/dW
};

// Ablation switches: force the interpolation weight to 1 inside the margin
// split and/or the loss combination while the input mixing keeps the drawn
// lambda.
struct LossFlags {
  bool margin_lambda_one = false;
  bool loss_lambda_one = false;
};

// cos_j = <e, W_j> / (|e| |W_j|) clamped to [-1+1e-7, 1-1e-7],
// theta_j = arccos(cos_j). Throws std::domain_error on a zero-norm input.
void cosines_and_angles(const Embedding& e, const ClassCenters& w,
                        std::vector<double>& cos_out,
                        std::vector<double>& theta_out);

// theta_a += lambda*m, theta_b += (1-lambda)*m; a == b gets the full m.
std::vector<double> apply_mixed_margin(const std::vector<double>& theta,
                                       std::size_t a, std::size_t b,
                                       double lambda, double m);

// value = -[lambda log softmax_a + (1-lambda) log softmax_b] over logits
// s*cos(theta-hat), with exact analytic gradients for e and W. Margin-
// shifted cosines use cos(theta+d) = cos*cos(d) - sin*sin(d) rather than
// an arccos round-trip.
LossOutput margin_mixup_loss(const Embedding& e, const ClassCenters& w,
                             std::size_t a, std::size_t b, double lambda,
                             const MarginConfig& cfg);

// Decoupled interpolation weights for the ablations.
LossOutput margin_mixup_loss_ex(const Embedding& e, const ClassCenters& w,
                                std::size_t a, std::size_t b,
                                double lambda_margin, double lambda_loss,
                                const MarginConfig& cfg);

// Mean of per-element losses; gradients carry the 1/batch factor.
BatchLossOutput batch_loss(const std::vector<Embedding>& embeddings,
                           const ClassCenters& w,
                           const std::vector<mix::SoftLabel>& labels,
                           const MarginConfig& cfg,
                           const LossFlags& flags = {});

}  // namespace loss
}  // namespace svmix

#endif  // SVMIX_LOSS_HPP
