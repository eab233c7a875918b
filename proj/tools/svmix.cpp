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

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svmix/experiments.hpp"
#include "svmix/rng.hpp"

namespace fs = std::filesystem;
using namespace svmix;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void print_table(const exp::ResultTable& t) {
  std::printf("%-14s %-14s %10s %10s\n", "system", "test_set", "eer", "eer_raw");
  for (const auto& r : t.rows)
    std::printf("%-14s %-14s %10.4f %10.4f\n", r.system.c_str(),
                r.test_set.c_str(), r.eer, r.eer_raw);
}

void emit(const exp::ResultTable& t, const std::string& out_dir,
          const std::string& csv_name) {
  exp::write_result_csv(join(out_dir, csv_name), t);
  exp::write_meta(join(out_dir, "meta.txt"), t);
  print_table(t);
  std::printf("wrote %s and meta.txt\n", join(out_dir, csv_name).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic speaker-verification testbed for margin-mixup"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "key=value experiment config file");
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* gen = app.add_subcommand("gen-pool", "generate a speaker pool manifest");
  int wav_count = 0;
  gen->add_option("--wav", wav_count,
                  "also write one sample WAV for the first N speakers");

  auto* train = app.add_subcommand("train", "train one embedding model");
  bool opt_mixup = false, opt_margin_l1 = false, opt_loss_l1 = false;
  double opt_alpha = 0.0;
  train->add_flag("--mixup", opt_mixup, "enable margin-mixup");
  train->add_flag("--margin-lambda-one", opt_margin_l1,
                  "ablation: lambda = 1 in the mixed margin");
  train->add_flag("--loss-lambda-one", opt_loss_l1,
                  "ablation: lambda = 1 in the loss combination");
  train->add_option("--alpha", opt_alpha,
                    "override both beta-distribution parameters");

  auto* ev = app.add_subcommand("eval", "score trials with a trained model");
  std::string model_path, trials_path;
  bool opt_overlap = false, opt_no_snorm = false;
  double opt_snr = 0.0;
  bool snr_given = false;
  ev->add_option("--model", model_path, "model checkpoint")->required();
  ev->add_option("--trials", trials_path, "read trials from a manifest");
  ev->add_flag("--overlap", opt_overlap,
               "build overlapped trials over the configured SNR range");
  ev->add_option("--snr", opt_snr, "build overlapped trials at one fixed SNR")
      ->each([&](const std::string&) { snr_given = true; });
  ev->add_flag("--no-snorm", opt_no_snorm, "skip adaptive s-norm");

  auto* headline = app.add_subcommand(
      "headline", "baseline vs margin-mixup on clean and overlapped sets");
  auto* ablation =
      app.add_subcommand("ablation", "lambda-override ablations A/B/C");
  auto* beta_sweep =
      app.add_subcommand("beta-sweep", "sweep the beta parameter alpha=beta");
  std::vector<double> opt_alphas;
  beta_sweep->add_option("--alphas", opt_alphas, "alpha grid (default from config)")
      ->delimiter(',');
  auto* snr_sweep =
      app.add_subcommand("snr-sweep", "baseline vs margin-mixup across SNRs");
  std::vector<double> opt_grid;
  snr_sweep->add_option("--grid", opt_grid, "SNR grid in dB (default from config)")
      ->delimiter(',');

  auto* dump = app.add_subcommand(
      "dump-embeddings", "embeddings of two speakers and their mixtures");
  std::string dump_model;
  std::size_t spk_a = 0, spk_b = 1;
  std::vector<double> opt_snrs;
  dump->add_option("--model", dump_model, "model checkpoint")->required();
  dump->add_option("--speaker-a", spk_a, "eval-bank speaker index")
      ->capture_default_str();
  dump->add_option("--speaker-b", spk_b, "eval-bank speaker index")
      ->capture_default_str();
  dump->add_option("--snrs", opt_snrs, "mixture SNRs in dB (default from config)")
      ->delimiter(',');

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    exp::ExperimentConfig cfg = config_path.empty()
                                    ? exp::ExperimentConfig{}
                                    : exp::ExperimentConfig::from_file(config_path);
    cfg.validate();
    fs::create_directories(out_dir);

    if (gen->parsed()) {
      auto pool = exp::gen_pool(cfg, seed);
      signal::write_speaker_manifest(join(out_dir, "pool.txt"), pool);
      std::printf("wrote %s (%zu speakers)\n", join(out_dir, "pool.txt").c_str(),
                  pool.size());
      int n = std::min<int>(wav_count, static_cast<int>(pool.size()));
      for (int i = 0; i < n; ++i) {
        bool is_train = static_cast<std::size_t>(i) < cfg.n_train_speakers;
        double dur = is_train ? cfg.train_utt_seconds : cfg.eval_utt_seconds;
        auto w = signal::synth_utterance(
            pool[i], dur, cfg.sample_rate, cfg.noise_floor,
            Rng(seed).child_seed(streams::kUtterance, pool[i].speaker_id, 0));
        std::string name = "spk" + std::to_string(pool[i].speaker_id) +
                           "_utt0.wav";
        signal::write_wav(join(out_dir, name), w);
      }
      if (n > 0) std::printf("wrote %d sample WAVs\n", n);
    } else if (train->parsed()) {
      exp::Banks banks = exp::make_banks(cfg, seed);
      exp::SystemSpec spec;
      spec.mixup = opt_mixup;
      spec.flags = {opt_margin_l1, opt_loss_l1};
      spec.beta = opt_alpha > 0.0
                      ? mix::BetaParams{opt_alpha, opt_alpha}
                      : mix::BetaParams{cfg.mixup_alpha, cfg.mixup_beta};
      std::vector<model::TrainLogRow> log;
      model::EmbeddingModel m =
          exp::train_system(banks.train, cfg, seed, spec, &log);
      model::save_model(join(out_dir, "model.ckpt"), m);
      model::write_train_log(join(out_dir, "train_log.csv"), log);
      std::printf("trained %zu params, final loss %.6f\n", m.n_params(),
                  log.empty() ? 0.0 : log.back().loss);
      std::printf("wrote %s and train_log.csv\n",
                  join(out_dir, "model.ckpt").c_str());
    } else if (ev->parsed()) {
      exp::Banks banks = exp::make_banks(cfg, seed);
      model::EmbeddingModel m = model::load_model(model_path);
      std::vector<eval::Trial> trials;
      if (!trials_path.empty()) {
        trials = eval::read_trials(trials_path, banks.eval);
      } else {
        std::optional<std::pair<double, double>> overlap;
        if (snr_given)
          overlap = std::make_pair(opt_snr, opt_snr);
        else if (opt_overlap)
          overlap = std::make_pair(cfg.eval_snr_lo, cfg.eval_snr_hi);
        trials = eval::build_trials(banks.eval.n_speakers(),
                                    cfg.eval_utts_per_speaker,
                                    cfg.n_target_trials, cfg.n_nontarget_trials,
                                    overlap, seed);
        eval::write_trials(join(out_dir, "trials.txt"), trials, banks.eval);
      }
      eval::Cohort cohort;
      if (!opt_no_snorm) {
        std::size_t top_k = std::min(cfg.snorm_top_k, banks.train.n_speakers());
        cohort = eval::build_cohort(m, banks.train, top_k, cfg.frame_ms,
                                    cfg.hop_ms);
      }
      eval::EvalResult r = eval::evaluate(m, banks.eval, trials, cohort,
                                          cfg.frame_ms, cfg.hop_ms);
      eval::write_scores(join(out_dir, "scores.csv"), r.scores, banks.eval);
      if (r.snorm_fallback)
        std::fprintf(stderr,
                     "warning: zero-variance cohort, s-norm fell back to raw\n");
      std::printf("eer_raw=%.6f thr_raw=%.6f\n", r.eer_raw, r.thr_raw);
      std::printf("eer_norm=%.6f thr_norm=%.6f\n", r.eer_norm, r.thr_norm);
      std::printf("wrote %s\n", join(out_dir, "scores.csv").c_str());
    } else if (headline->parsed()) {
      emit(exp::run_headline(cfg, seed), out_dir, "headline.csv");
    } else if (ablation->parsed()) {
      emit(exp::run_ablation(cfg, seed), out_dir, "ablation.csv");
    } else if (beta_sweep->parsed()) {
      const auto& alphas = opt_alphas.empty() ? cfg.beta_grid : opt_alphas;
      emit(exp::run_beta_sweep(cfg, alphas, seed), out_dir, "beta_sweep.csv");
    } else if (snr_sweep->parsed()) {
      const auto& grid = opt_grid.empty() ? cfg.snr_grid : opt_grid;
      emit(exp::run_snr_sweep(cfg, grid, seed), out_dir, "snr_sweep.csv");
    } else if (dump->parsed()) {
      exp::Banks banks = exp::make_banks(cfg, seed);
      model::EmbeddingModel m = model::load_model(dump_model);
      const auto& snrs = opt_snrs.empty() ? cfg.snr_grid : opt_snrs;
      auto rows = eval::dump_mixture_embeddings(m, banks.eval, spk_a, spk_b,
                                                snrs, cfg.frame_ms, cfg.hop_ms);
      eval::write_mixture_csv(join(out_dir, "embeddings.csv"), rows);
      std::printf("wrote %s (%zu rows)\n",
                  join(out_dir, "embeddings.csv").c_str(), rows.size());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
