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

#ifndef SVMIX_EXPERIMENTS_HPP
#define SVMIX_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "svmix/data.hpp"
#include "svmix/eval.hpp"
#include "svmix/model.hpp"

namespace svmix::exp {

// Flat key=value configuration. Every field has a desk-scale default; the
// parser rejects unknown keys. `canonical()` is the sorted key=value
// listing used for hashing and for writing config files back out.
struct ExperimentConfig {
  // speaker pool
  std::size_t n_train_speakers = 50;
  std::size_t n_eval_speakers = 20;
  std::size_t components_min = 4;
  std::size_t components_max = 8;
  double freq_min_hz = 200.0;
  double freq_max_hz = 1900.0;
  double amp_min = 0.3;
  double amp_max = 1.0;
  double fundamental_jitter = 0.01;
  double noise_floor = 0.05;
  int sample_rate = 4000;
  double train_utt_seconds = 6.0;
  double eval_utt_seconds = 4.0;
  int train_utts_per_speaker = 8;
  int eval_utts_per_speaker = 8;

  // features
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t feature_bins = 24;

  // model
  std::size_t hidden_dim = 32;
  std::size_t embed_dim = 32;

  // training
  std::size_t batch_size = 32;
  double loss_scale = 30.0;
  double lr_min = 1e-8;
  double weight_decay = 2e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t freq_mask_max = 3;
  std::size_t time_mask_max = 5;
  std::size_t log_every = 50;
  std::size_t phase1_steps = 3000;
  double phase1_margin = 0.2;
  double phase1_crop_s = 2.0;
  double phase1_lr_max = 1e-3;
  std::size_t phase1_cycle_len = 1500;
  bool phase1_augment = true;
  std::size_t phase2_steps = 1000;
  double phase2_margin = 0.5;
  double phase2_crop_s = 5.0;
  double phase2_lr_max = 1e-5;
  std::size_t phase2_cycle_len = 500;
  bool phase2_augment = false;
  double mixup_alpha = 0.2;
  double mixup_beta = 0.2;

  // evaluation
  std::size_t n_target_trials = 500;
  std::size_t n_nontarget_trials = 500;
  std::size_t snorm_top_k = 50;
  double eval_snr_lo = 0.0;
  double eval_snr_hi = 5.0;
  std::vector<double> snr_grid{0.0, 2.0, 5.0, 10.0, 20.0};
  std::vector<double> beta_grid{0.1, 0.2, 0.4, 0.8, 1.0};

  static ExperimentConfig from_file(const std::string& path);
  void apply(const std::string& key, const std::string& value);
  std::string canonical() const;
  std::uint64_t hash() const;  // FNV-1a over canonical()
  void validate() const;
};

struct ResultRow {
  std::string system;
  std::string test_set;
  double eer = 0.0;      // s-normalized
  double eer_raw = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  const ResultRow& find(const std::string& system,
                        const std::string& test_set) const;
};

std::string to_csv(const ResultTable& t);
ResultTable parse_csv(const std::string& csv);
void write_result_csv(const std::string& path, const ResultTable& t);
void write_meta(const std::string& path, const ResultTable& t);

// Train+eval speaker profiles with sequential ids; the first
// n_train_speakers rows are the training pool.
std::vector<signal::SpeakerProfile> gen_pool(const ExperimentConfig& cfg,
                                             std::uint64_t seed);

// Each driver is a pure function of (cfg, seed): all compared systems share
// one data stream and differ only in the studied variable.
ResultTable run_headline(const ExperimentConfig& cfg, std::uint64_t seed);
ResultTable run_ablation(const ExperimentConfig& cfg, std::uint64_t seed);
ResultTable run_beta_sweep(const ExperimentConfig& cfg,
                           const std::vector<double>& alphas,
                           std::uint64_t seed);
ResultTable run_snr_sweep(const ExperimentConfig& cfg,
                          const std::vector<double>& snr_grid,
                          std::uint64_t seed);

// Shared plumbing, exposed for the CLI subcommands.
struct SystemSpec {
  bool mixup = false;
  loss::LossFlags flags;
  mix::BetaParams beta;
};

struct Banks {
  data::UtteranceBank train;
  data::UtteranceBank eval;
};
Banks make_banks(const ExperimentConfig& cfg, std::uint64_t seed);

model::EmbeddingModel train_system(data::UtteranceBank& train_bank,
                                   const ExperimentConfig& cfg,
                                   std::uint64_t seed, const SystemSpec& spec,
                                   std::vector<model::TrainLogRow>* log = nullptr,
                                   std::vector<std::uint64_t>* trace = nullptr);

eval::EvalResult eval_system(const model::EmbeddingModel& m, Banks& banks,
                             const ExperimentConfig& cfg, std::uint64_t seed,
                             std::optional<std::pair<double, double>> overlap);

}  // namespace svmix::exp

#endif  // SVMIX_EXPERIMENTS_HPP
