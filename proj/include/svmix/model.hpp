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

#ifndef SVMIX_MODEL_HPP
#define SVMIX_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "svmix/data.hpp"
#include "svmix/features.hpp"
#include "svmix/loss.hpp"
#include "svmix/mixup.hpp"

namespace svmix::model {

// Frame affine + tanh, temporal mean/std pooling, affine projection.
// Weight matrices are stored with one output unit per row.
struct EmbeddingModel {
  std::size_t feat_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t embed_dim = 0;
  std::vector<double> frame_w;  // [hidden][feat]
  std::vector<double> frame_b;  // [hidden]
  std::vector<double> proj_w;   // [embed][2*hidden]
  std::vector<double> proj_b;   // [embed]
  loss::ClassCenters centers;   // [n_classes][embed]

  std::size_t n_params() const {
    return frame_w.size() + frame_b.size() + proj_w.size() + proj_b.size() +
           centers.w.size();
  }

  // Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases.
  static EmbeddingModel init(std::size_t feat_dim, std::size_t hidden_dim,
                             std::size_t embed_dim, std::size_t n_classes,
                             std::uint64_t seed);
};

struct ForwardCache {
  std::size_t t = 0;
  std::vector<double> hidden;  // [t][hidden]
  std::vector<double> mean;    // [hidden]
  std::vector<double> sigma;   // [hidden], sqrt(var + 1e-8)
  std::vector<double> pooled;  // [2*hidden]
};

Embedding forward(const EmbeddingModel& m, const feat::FeatureMatrix& f);
Embedding forward_cached(const EmbeddingModel& m, const feat::FeatureMatrix& f,
                         ForwardCache& cache);

struct ModelGrads {
  std::vector<double> frame_w, frame_b, proj_w, proj_b;
};

// Exact gradients of <loss_grad_e, embedding> w.r.t. model parameters.
ModelGrads backward(const EmbeddingModel& m, const feat::FeatureMatrix& f,
                    const ForwardCache& cache,
                    const std::vector<double>& loss_grad_e);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
};

struct OptimizerState {
  AdamConfig cfg;
  std::vector<double> m1;
  std::vector<double> m2;
  std::uint64_t step = 0;

  OptimizerState(std::size_t n_params, const AdamConfig& c)
      : cfg(c), m1(n_params, 0.0), m2(n_params, 0.0) {}
};

struct ParamView {
  double* p = nullptr;
  const double* g = nullptr;
  std::size_t n = 0;
};

// Bias-corrected Adam plus decoupled decay (p -= lr*wd*p_old). Throws a
// training-divergence error on non-finite gradients.
void adam_step(OptimizerState& state, const std::vector<ParamView>& groups,
               double lr);

// Triangular wave lr_min -> lr_max -> lr_min over cycle_len steps with the
// peak halving each full cycle (triangular2).
struct ClrSchedule {
  double lr_min = 1e-8;
  double lr_max = 1e-3;
  std::size_t cycle_len = 1000;
};
double clr_lr(const ClrSchedule& s, std::uint64_t step);

struct TrainPhaseConfig {
  double margin = 0.2;
  double crop_s = 2.0;
  bool augment = true;
  double lr_max = 1e-3;
  std::size_t cycle_len = 1500;
  std::size_t steps = 3000;
  bool mixup = false;
  mix::BetaParams beta;
};

struct TrainerConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t feature_bins = 24;
  std::size_t hidden_dim = 32;
  std::size_t embed_dim = 32;
  std::size_t batch_size = 32;
  double lr_min = 1e-8;
  double loss_scale = 30.0;
  AdamConfig adam{0.9, 0.999, 1e-8, 2e-4};
  std::size_t freq_mask_max = 3;
  std::size_t time_mask_max = 5;
  std::size_t log_every = 50;
  loss::LossFlags loss_flags;  // ablation overrides; input mixing unaffected
};

struct TrainLogRow {
  std::size_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

// Runs the phases in order. All randomness is derived from (seed, purpose,
// step, element), so runs with different mixup/augment settings still draw
// identical utterances, crops and masks. `data_trace`, when given, records
// one digest of those draws per step.
EmbeddingModel train(data::UtteranceBank& bank, const TrainerConfig& tc,
                     const std::vector<TrainPhaseConfig>& phases,
                     std::uint64_t seed,
                     std::vector<TrainLogRow>* log = nullptr,
                     std::vector<std::uint64_t>* data_trace = nullptr);

// Binary checkpoint with version tag and shape header; round-trip exact.
void save_model(const std::string& path, const EmbeddingModel& m);
EmbeddingModel load_model(const std::string& path);

void write_train_log(const std::string& path,
                     const std::vector<TrainLogRow>& rows);

}  // namespace svmix::model

#endif  // SVMIX_MODEL_HPP
