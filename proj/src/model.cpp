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

#include "svmix/model.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "svmix/kernels.hpp"
#include "svmix/rng.hpp"

namespace svmix::model {

namespace {

constexpr double kVarEps = 1e-8;
constexpr char kMagic[4] = {'S', 'V', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;

void init_uniform(std::vector<double>& w, std::size_t fan_in,
                  std::size_t fan_out, Rng& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& x : w) x = rng.uniform(-bound, bound);
}

}  // namespace

EmbeddingModel EmbeddingModel::init(std::size_t feat_dim,
                                    std::size_t hidden_dim,
                                    std::size_t embed_dim,
                                    std::size_t n_classes,
                                    std::uint64_t seed) {
  if (feat_dim == 0 || n_classes == 0)
    throw std::invalid_argument("EmbeddingModel: empty dimension");
  if (embed_dim < 2 || hidden_dim < embed_dim)
    throw std::invalid_argument("EmbeddingModel: need D >= 2 and H >= D");

  EmbeddingModel m;
  m.feat_dim = feat_dim;
  m.hidden_dim = hidden_dim;
  m.embed_dim = embed_dim;
  m.frame_w.resize(hidden_dim * feat_dim);
  m.frame_b.assign(hidden_dim, 0.0);
  m.proj_w.resize(embed_dim * 2 * hidden_dim);
  m.proj_b.assign(embed_dim, 0.0);
  m.centers = loss::ClassCenters(embed_dim, n_classes);

  Rng rng(seed);
  init_uniform(m.frame_w, feat_dim, hidden_dim, rng);
  init_uniform(m.proj_w, 2 * hidden_dim, embed_dim, rng);
  init_uniform(m.centers.w, embed_dim, n_classes, rng);
  return m;
}

Embedding forward_cached(const EmbeddingModel& m, const feat::FeatureMatrix& f,
                         ForwardCache& cache) {
  if (f.f != m.feat_dim)
    throw std::invalid_argument("forward: feature dimension mismatch");
  if (f.t == 0) throw std::invalid_argument("forward: empty feature matrix");

  const std::size_t t_frames = f.t;
  const std::size_t h = m.hidden_dim;
  cache.t = t_frames;
  cache.hidden.resize(t_frames * h);
  for (std::size_t ti = 0; ti < t_frames; ++ti) {
    double* row = cache.hidden.data() + ti * h;
    kern::matvec(m.frame_w.data(), f.row(ti), row, h, m.feat_dim);
    for (std::size_t j = 0; j < h; ++j) row[j] = std::tanh(row[j] + m.frame_b[j]);
  }

  cache.mean.assign(h, 0.0);
  for (std::size_t ti = 0; ti < t_frames; ++ti)
    kern::axpy(1.0, cache.hidden.data() + ti * h, cache.mean.data(), h);
  kern::scale(1.0 / static_cast<double>(t_frames), cache.mean.data(), h);

  std::vector<double> var(h, 0.0);
  for (std::size_t ti = 0; ti < t_frames; ++ti) {
    const double* row = cache.hidden.data() + ti * h;
    for (std::size_t j = 0; j < h; ++j) {
      const double d = row[j] - cache.mean[j];
      var[j] += d * d;
    }
  }
  cache.sigma.resize(h);
  for (std::size_t j = 0; j < h; ++j)
    cache.sigma[j] =
        std::sqrt(var[j] / static_cast<double>(t_frames) + kVarEps);

  cache.pooled.resize(2 * h);
  std::memcpy(cache.pooled.data(), cache.mean.data(), h * sizeof(double));
  std::memcpy(cache.pooled.data() + h, cache.sigma.data(), h * sizeof(double));

  Embedding e(m.embed_dim);
  kern::matvec(m.proj_w.data(), cache.pooled.data(), e.data(), m.embed_dim,
               2 * h);
  for (std::size_t d = 0; d < m.embed_dim; ++d) e[d] += m.proj_b[d];
  return e;
}

Embedding forward(const EmbeddingModel& m, const feat::FeatureMatrix& f) {
  ForwardCache cache;
  return forward_cached(m, f, cache);
}

ModelGrads backward(const EmbeddingModel& m, const feat::FeatureMatrix& f,
                    const ForwardCache& cache,
                    const std::vector<double>& loss_grad_e) {
  if (loss_grad_e.size() != m.embed_dim)
    throw std::invalid_argument("backward: gradient dimension mismatch");
  if (cache.t == 0 || f.t != cache.t)
    throw std::invalid_argument("backward: stale forward cache");

  const std::size_t t_frames = cache.t;
  const std::size_t h = m.hidden_dim;
  const double inv_t = 1.0 / static_cast<double>(t_frames);

  ModelGrads g;
  g.proj_b = loss_grad_e;
  g.proj_w.assign(m.proj_w.size(), 0.0);
  kern::outer_acc(loss_grad_e.data(), cache.pooled.data(), g.proj_w.data(),
                  m.embed_dim, 2 * h);

  std::vector<double> dpool(2 * h, 0.0);
  for (std::size_t d = 0; d < m.embed_dim; ++d)
    kern::axpy(loss_grad_e[d], m.proj_w.data() + d * 2 * h, dpool.data(),
               2 * h);

  g.frame_w.assign(m.frame_w.size(), 0.0);
  g.frame_b.assign(h, 0.0);
  std::vector<double> dz(h);
  for (std::size_t ti = 0; ti < t_frames; ++ti) {
    const double* row = cache.hidden.data() + ti * h;
    for (std::size_t j = 0; j < h; ++j) {
      // mean branch + std branch (std grad is 0 at zero variance since
      // row[j] == mean[j] there)
      const double dhid =
          inv_t * (dpool[j] +
                   dpool[h + j] * (row[j] - cache.mean[j]) / cache.sigma[j]);
      dz[j] = dhid * (1.0 - row[j] * row[j]);
      g.frame_b[j] += dz[j];
    }
    kern::outer_acc(dz.data(), f.row(ti), g.frame_w.data(), h, m.feat_dim);
  }
  return g;
}

void adam_step(OptimizerState& state, const std::vector<ParamView>& groups,
               double lr) {
  std::size_t total = 0;
  for (const auto& gr : groups) total += gr.n;
  if (total != state.m1.size())
    throw std::invalid_argument("adam_step: state size does not match parameters");

  state.step += 1;
  const double b1 = state.cfg.beta1;
  const double b2 = state.cfg.beta2;
  const double bc1 =
      1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 =
      1.0 - std::pow(b2, static_cast<double>(state.step));

  std::size_t off = 0;
  for (const auto& gr : groups) {
    for (std::size_t i = 0; i < gr.n; ++i) {
      const double g = gr.g[i];
      if (!std::isfinite(g))
        throw std::runtime_error("training divergence: non-finite gradient");
      double& m1 = state.m1[off + i];
      double& m2 = state.m2[off + i];
      m1 = b1 * m1 + (1.0 - b1) * g;
      m2 = b2 * m2 + (1.0 - b2) * g * g;
      const double upd = (m1 / bc1) / (std::sqrt(m2 / bc2) + state.cfg.eps);
      const double p_old = gr.p[i];
      gr.p[i] = p_old - lr * upd - lr * state.cfg.weight_decay * p_old;
    }
    off += gr.n;
  }
}

double clr_lr(const ClrSchedule& s, std::uint64_t step) {
  if (!(s.lr_min < s.lr_max) || s.cycle_len == 0)
    throw std::invalid_argument("clr_lr: bad schedule");
  const std::uint64_t cycle = step / s.cycle_len;
  const double pos = static_cast<double>(step % s.cycle_len) /
                     static_cast<double>(s.cycle_len);
  const double tri = 1.0 - std::fabs(2.0 * pos - 1.0);
  const double amp =
      (s.lr_max - s.lr_min) / std::pow(2.0, static_cast<double>(cycle));
  return s.lr_min + amp * tri;
}

EmbeddingModel train(data::UtteranceBank& bank, const TrainerConfig& tc,
                     const std::vector<TrainPhaseConfig>& phases,
                     std::uint64_t seed, std::vector<TrainLogRow>* log,
                     std::vector<std::uint64_t>* data_trace) {
  const std::size_t n_spk = bank.n_speakers();
  if (n_spk < 2) throw std::invalid_argument("train: need at least 2 speakers");
  if (phases.empty()) throw std::invalid_argument("train: empty phase list");
  if (tc.batch_size < 1) throw std::invalid_argument("train: bad batch size");

  const Rng root(seed);
  EmbeddingModel m =
      EmbeddingModel::init(tc.feature_bins, tc.hidden_dim, tc.embed_dim, n_spk,
                           root.child_seed(streams::kInit));
  OptimizerState opt(m.n_params(), tc.adam);

  const std::size_t bsz = tc.batch_size;

  std::vector<std::size_t> spk(bsz);
  std::vector<int> utt(bsz);
  std::vector<signal::Waveform> crops(bsz);
  std::vector<signal::Waveform> waves(bsz);
  std::vector<mix::SoftLabel> labels(bsz);
  std::vector<feat::FeatureMatrix> feats(bsz);
  std::vector<ForwardCache> caches(bsz);
  std::vector<Embedding> embeddings(bsz);

  std::size_t global_step = 0;
  for (const TrainPhaseConfig& phase : phases) {
    const ClrSchedule sched{tc.lr_min, phase.lr_max, phase.cycle_len};
    const loss::MarginConfig mcfg{phase.margin, tc.loss_scale};

    for (std::size_t step = 0; step < phase.steps; ++step, ++global_step) {
      const double lr = clr_lr(sched, step);

      Rng brng = root.child(streams::kBatch, global_step);
      for (std::size_t i = 0; i < bsz; ++i) {
        spk[i] = static_cast<std::size_t>(brng.uniform_int(n_spk));
        utt[i] = static_cast<int>(brng.uniform_int(
            static_cast<std::uint64_t>(bank.utts_per_speaker())));
        crops[i] = signal::random_crop(
            bank.get(spk[i], utt[i]), phase.crop_s,
            root.child_seed(streams::kCrop, global_step, i));
      }

      if (data_trace) {
        std::uint64_t digest = 0;
        for (std::size_t i = 0; i < bsz; ++i) {
          digest = hash_combine(digest, spk[i]);
          digest = hash_combine(digest, static_cast<std::uint64_t>(utt[i]));
          digest = hash_combine(digest,
                                std::bit_cast<std::uint64_t>(crops[i].samples[0]));
          digest = hash_combine(digest, crops[i].samples.size());
        }
        data_trace->push_back(digest);
      }

      if (phase.mixup) {
        const auto plan = mix::batch_mixup_plan(
            bsz, phase.beta, root.child_seed(streams::kMixup, global_step));
        for (std::size_t i = 0; i < bsz; ++i) {
          waves[i] =
              mix::mix_waveforms(crops[i], crops[plan[i].partner],
                                 plan[i].lambda);
          labels[i] = mix::mix_labels(static_cast<int>(spk[i]),
                                      static_cast<int>(spk[plan[i].partner]),
                                      plan[i].lambda);
        }
      } else {
        for (std::size_t i = 0; i < bsz; ++i) {
          waves[i] = std::move(crops[i]);
          labels[i] = mix::SoftLabel::single(static_cast<int>(spk[i]));
        }
      }

      for (std::size_t i = 0; i < bsz; ++i) {
        feats[i] = feat::extract_features(waves[i], tc.frame_ms, tc.hop_ms,
                                          tc.feature_bins);
        if (phase.augment)
          feats[i] = feat::spec_augment(
              feats[i], tc.freq_mask_max, tc.time_mask_max,
              root.child_seed(streams::kAugment, global_step, i));
        feats[i] = feat::mean_normalize(feats[i]);
        embeddings[i] = forward_cached(m, feats[i], caches[i]);
      }

      const loss::BatchLossOutput bl =
          loss::batch_loss(embeddings, m.centers, labels, mcfg, tc.loss_flags);
      if (!std::isfinite(bl.value))
        throw std::runtime_error(
            "training divergence: non-finite loss at step " +
            std::to_string(global_step));

      ModelGrads acc;
      acc.frame_w.assign(m.frame_w.size(), 0.0);
      acc.frame_b.assign(m.frame_b.size(), 0.0);
      acc.proj_w.assign(m.proj_w.size(), 0.0);
      acc.proj_b.assign(m.proj_b.size(), 0.0);
      for (std::size_t i = 0; i < bsz; ++i) {
        const ModelGrads g =
            backward(m, feats[i], caches[i], bl.grad_embeddings[i]);
        kern::axpy(1.0, g.frame_w.data(), acc.frame_w.data(), acc.frame_w.size());
        kern::axpy(1.0, g.frame_b.data(), acc.frame_b.data(), acc.frame_b.size());
        kern::axpy(1.0, g.proj_w.data(), acc.proj_w.data(), acc.proj_w.size());
        kern::axpy(1.0, g.proj_b.data(), acc.proj_b.data(), acc.proj_b.size());
      }

      adam_step(opt,
                {{m.frame_w.data(), acc.frame_w.data(), m.frame_w.size()},
                 {m.frame_b.data(), acc.frame_b.data(), m.frame_b.size()},
                 {m.proj_w.data(), acc.proj_w.data(), m.proj_w.size()},
                 {m.proj_b.data(), acc.proj_b.data(), m.proj_b.size()},
                 {m.centers.w.data(), bl.grad_w.data(), m.centers.w.size()}},
                lr);

      if (log && (step % tc.log_every == 0 || step + 1 == phase.steps))
        log->push_back({global_step, lr, bl.value});
    }
  }
  return m;
}

namespace {

void write_bytes(std::ofstream& f, const void* p, std::size_t n) {
  f.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& f, void* p, std::size_t n) {
  f.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (f.gcount() != static_cast<std::streamsize>(n))
    throw std::runtime_error("load_model: truncated checkpoint");
}

}  // namespace

void save_model(const std::string& path, const EmbeddingModel& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_model: cannot open " + path);
  write_bytes(f, kMagic, 4);
  write_bytes(f, &kVersion, 4);
  const std::uint64_t dims[4] = {m.feat_dim, m.hidden_dim, m.embed_dim,
                                 m.centers.n_classes};
  write_bytes(f, dims, sizeof dims);
  write_bytes(f, m.frame_w.data(), m.frame_w.size() * sizeof(double));
  write_bytes(f, m.frame_b.data(), m.frame_b.size() * sizeof(double));
  write_bytes(f, m.proj_w.data(), m.proj_w.size() * sizeof(double));
  write_bytes(f, m.proj_b.data(), m.proj_b.size() * sizeof(double));
  write_bytes(f, m.centers.w.data(), m.centers.w.size() * sizeof(double));
  if (!f) throw std::runtime_error("save_model: write failed for " + path);
}

EmbeddingModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_model: cannot open " + path);
  char magic[4];
  read_bytes(f, magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("load_model: not a model checkpoint: " + path);
  std::uint32_t version = 0;
  read_bytes(f, &version, 4);
  if (version != kVersion)
    throw std::runtime_error("load_model: unsupported checkpoint version");
  std::uint64_t dims[4];
  read_bytes(f, dims, sizeof dims);

  EmbeddingModel m;
  m.feat_dim = dims[0];
  m.hidden_dim = dims[1];
  m.embed_dim = dims[2];
  m.frame_w.resize(m.hidden_dim * m.feat_dim);
  m.frame_b.resize(m.hidden_dim);
  m.proj_w.resize(m.embed_dim * 2 * m.hidden_dim);
  m.proj_b.resize(m.embed_dim);
  m.centers = loss::ClassCenters(m.embed_dim, dims[3]);
  read_bytes(f, m.frame_w.data(), m.frame_w.size() * sizeof(double));
  read_bytes(f, m.frame_b.data(), m.frame_b.size() * sizeof(double));
  read_bytes(f, m.proj_w.data(), m.proj_w.size() * sizeof(double));
  read_bytes(f, m.proj_b.data(), m.proj_b.size() * sizeof(double));
  read_bytes(f, m.centers.w.data(), m.centers.w.size() * sizeof(double));
  return m;
}

void write_train_log(const std::string& path,
                     const std::vector<TrainLogRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_train_log: cannot open " + path);
  f << "step,lr,loss\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", r.step, r.lr, r.loss);
    f << buf;
  }
  if (!f) throw std::runtime_error("write_train_log: write failed");
}

}  // namespace svmix::model
