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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "svmix/data.hpp"
#include "svmix/eval.hpp"
#include "svmix/model.hpp"
#include "svmix/rng.hpp"

using namespace svmix;
using model::EmbeddingModel;

namespace {

feat::FeatureMatrix rand_features(Rng& r, std::size_t t, std::size_t f) {
  feat::FeatureMatrix m;
  m.t = t;
  m.f = f;
  m.frame_ms = 25.0;
  m.hop_ms = 10.0;
  m.v.resize(t * f);
  for (double& x : m.v) x = r.uniform(-2, 2);
  return m;
}

// Plain-loop forward, no shared code with the implementation.
Embedding naive_forward(const EmbeddingModel& m, const feat::FeatureMatrix& f) {
  const std::size_t t = f.t, nf = f.f, h = m.hidden_dim;
  std::vector<double> hidden(t * h);
  for (std::size_t ti = 0; ti < t; ++ti)
    for (std::size_t j = 0; j < h; ++j) {
      double z = m.frame_b[j];
      for (std::size_t k = 0; k < nf; ++k)
        z += m.frame_w[j * nf + k] * f.v[ti * nf + k];
      hidden[ti * h + j] = std::tanh(z);
    }
  std::vector<double> mean(h, 0.0), var(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t ti = 0; ti < t; ++ti) mean[j] += hidden[ti * h + j];
    mean[j] /= static_cast<double>(t);
    for (std::size_t ti = 0; ti < t; ++ti) {
      const double d = hidden[ti * h + j] - mean[j];
      var[j] += d * d;
    }
    var[j] /= static_cast<double>(t);
  }
  Embedding e(m.embed_dim);
  for (std::size_t d = 0; d < m.embed_dim; ++d) {
    double z = m.proj_b[d];
    for (std::size_t j = 0; j < h; ++j) {
      z += m.proj_w[d * 2 * h + j] * mean[j];
      z += m.proj_w[d * 2 * h + h + j] * std::sqrt(var[j] + 1e-8);
    }
    e[d] = z;
  }
  return e;
}

std::vector<signal::SpeakerProfile> toy_pool(int n) {
  std::vector<signal::SpeakerProfile> pool;
  for (int i = 0; i < n; ++i) {
    signal::SpeakerProfile p;
    p.speaker_id = i;
    const double f0 = 220.0 + 55.0 * i;
    p.components = {{f0, 1.0},
                    {f0 + 2.0 + 0.35 * i, 0.6},
                    {f0 * 1.5, 0.6},
                    {f0 * 1.5 + 3.0 + 0.3 * i, 0.4}};
    p.fundamental_jitter = 0.01;
    pool.push_back(p);
  }
  return pool;
}

data::UtteranceBank toy_bank(int n_speakers, int utts, double seconds) {
  return data::UtteranceBank(toy_pool(n_speakers), 4000, seconds, 0.05, utts,
                             7);
}

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("init shapes and bounds") {
  EmbeddingModel m = EmbeddingModel::init(6, 8, 4, 5, 123);
  CHECK(m.frame_w.size() == 48);
  CHECK(m.frame_b.size() == 8);
  CHECK(m.proj_w.size() == 4 * 16);
  CHECK(m.proj_b.size() == 4);
  CHECK(m.centers.w.size() == 20);
  CHECK(m.n_params() == 48 + 8 + 64 + 4 + 20);
  for (double b : m.frame_b) CHECK(b == 0.0);
  for (double b : m.proj_b) CHECK(b == 0.0);
  const double bound_fw = std::sqrt(6.0 / (6 + 8));
  for (double w : m.frame_w) {
    CHECK(w >= -bound_fw);
    CHECK(w <= bound_fw);
  }
  // same seed reproduces, different seed does not
  EmbeddingModel m2 = EmbeddingModel::init(6, 8, 4, 5, 123);
  CHECK(m.frame_w == m2.frame_w);
  CHECK(m.centers.w == m2.centers.w);
  EmbeddingModel m3 = EmbeddingModel::init(6, 8, 4, 5, 124);
  CHECK(m.frame_w != m3.frame_w);

  CHECK_THROWS_AS(EmbeddingModel::init(6, 8, 1, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(EmbeddingModel::init(6, 2, 4, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(EmbeddingModel::init(0, 8, 4, 5, 1), std::invalid_argument);
}

TEST_CASE("forward matches a naive loop implementation") {
  Rng r(11);
  EmbeddingModel m = EmbeddingModel::init(6, 8, 4, 5, 42);
  for (double& b : m.frame_b) b = r.uniform(-0.2, 0.2);
  for (double& b : m.proj_b) b = r.uniform(-0.2, 0.2);
  for (int rep = 0; rep < 10; ++rep) {
    feat::FeatureMatrix f = rand_features(r, 3 + rep, 6);
    Embedding got = model::forward(m, f);
    Embedding want = naive_forward(m, f);
    REQUIRE(got.size() == want.size());
    for (std::size_t d = 0; d < got.size(); ++d)
      CHECK(got[d] == doctest::Approx(want[d]).epsilon(1e-12));
  }
}

TEST_CASE("zero and time-constant input hit the variance floor") {
  Rng r(12);
  EmbeddingModel m = EmbeddingModel::init(5, 6, 3, 4, 9);
  for (double& b : m.proj_b) b = r.uniform(-1, 1);

  feat::FeatureMatrix zeros;
  zeros.t = 7;
  zeros.f = 5;
  zeros.v.assign(35, 0.0);
  model::ForwardCache cache;
  Embedding e = model::forward_cached(m, zeros, cache);
  for (double s : cache.sigma)
    CHECK(s == doctest::Approx(1e-4).epsilon(1e-9));
  for (double mu : cache.mean) CHECK(mu == 0.0);
  for (std::size_t d = 0; d < 3; ++d) {
    double want = m.proj_b[d];
    for (std::size_t j = 0; j < 6; ++j)
      want += m.proj_w[d * 12 + 6 + j] * cache.sigma[j];
    CHECK(e[d] == doctest::Approx(want).epsilon(1e-12));
  }

  feat::FeatureMatrix flat;
  flat.t = 9;
  flat.f = 5;
  flat.v.resize(45);
  std::vector<double> row(5);
  for (double& x : row) x = r.uniform(-1, 1);
  for (std::size_t ti = 0; ti < 9; ++ti)
    for (std::size_t k = 0; k < 5; ++k) flat.v[ti * 5 + k] = row[k];
  model::ForwardCache c2;
  model::forward_cached(m, flat, c2);
  for (double s : c2.sigma)
    CHECK(s == doctest::Approx(1e-4).epsilon(1e-6));
}

TEST_CASE("forward rejects bad input") {
  EmbeddingModel m = EmbeddingModel::init(5, 6, 3, 4, 9);
  feat::FeatureMatrix wrong;
  wrong.t = 3;
  wrong.f = 4;
  wrong.v.assign(12, 0.0);
  CHECK_THROWS_AS(model::forward(m, wrong), std::invalid_argument);
  feat::FeatureMatrix empty;
  empty.t = 0;
  empty.f = 5;
  CHECK_THROWS_AS(model::forward(m, empty), std::invalid_argument);
}

TEST_CASE("composite gradients match finite differences") {
  Rng r(13);
  const double h = 1e-6;
  const loss::MarginConfig cfg{0.2, 12.0};
  double max_rel = 0.0;

  auto rel_err = [](double a, double fd) {
    return std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
  };

  for (int inst = 0; inst < 6; ++inst) {
    EmbeddingModel m = EmbeddingModel::init(6, 8, 4, 5, 100 + inst);
    for (double& b : m.frame_b) b = r.uniform(-0.3, 0.3);
    for (double& b : m.proj_b) b = r.uniform(-0.3, 0.3);
    feat::FeatureMatrix f = rand_features(r, 7, 6);
    std::size_t a = r.uniform_int(5), bcl = r.uniform_int(5);
    double lam = (inst % 3 == 0) ? 1.0 : r.uniform();

    auto loss_of = [&](const EmbeddingModel& mm) {
      return loss::margin_mixup_loss(model::forward(mm, f), mm.centers, a, bcl,
                                     lam, cfg)
          .value;
    };

    model::ForwardCache cache;
    Embedding e = model::forward_cached(m, f, cache);
    loss::LossOutput lo = loss::margin_mixup_loss(e, m.centers, a, bcl, lam, cfg);
    model::ModelGrads g = model::backward(m, f, cache, lo.grad_e);

    auto check_group = [&](std::vector<double> EmbeddingModel::* field,
                           const std::vector<double>& analytic) {
      std::vector<double>& params = m.*field;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = loss_of(m);
        params[i] = keep - h;
        const double dn = loss_of(m);
        params[i] = keep;
        max_rel = std::max(max_rel, rel_err(analytic[i], (up - dn) / (2 * h)));
      }
    };
    check_group(&EmbeddingModel::frame_w, g.frame_w);
    check_group(&EmbeddingModel::frame_b, g.frame_b);
    check_group(&EmbeddingModel::proj_w, g.proj_w);
    check_group(&EmbeddingModel::proj_b, g.proj_b);

    for (std::size_t i = 0; i < m.centers.w.size(); ++i) {
      const double keep = m.centers.w[i];
      m.centers.w[i] = keep + h;
      const double up = loss_of(m);
      m.centers.w[i] = keep - h;
      const double dn = loss_of(m);
      m.centers.w[i] = keep;
      max_rel = std::max(max_rel, rel_err(lo.grad_w[i], (up - dn) / (2 * h)));
    }
  }
  CHECK(max_rel < 1e-5);
}

TEST_CASE("adam first step and decoupled decay") {
  model::AdamConfig cfg;
  SUBCASE("first step moves by about lr") {
    model::OptimizerState st(1, cfg);
    double p = 1.0, g = 0.5;
    model::adam_step(st, {{&p, &g, 1}}, 0.1);
    CHECK(p == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(st.step == 1);
  }
  SUBCASE("zero grad with decay multiplies by (1 - lr*wd)") {
    cfg.weight_decay = 0.01;
    model::OptimizerState st(2, cfg);
    double p[2] = {1.0, -3.0}, g[2] = {0.0, 0.0};
    model::adam_step(st, {{p, g, 2}}, 0.1);
    CHECK(p[0] == doctest::Approx(1.0 - 0.1 * 0.01).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(-3.0 * (1.0 - 0.1 * 0.01)).epsilon(1e-15));
  }
  SUBCASE("zero grad zero decay is a fixed point") {
    model::OptimizerState st(1, cfg);
    double p = 2.5, g = 0.0;
    model::adam_step(st, {{&p, &g, 1}}, 0.1);
    CHECK(p == 2.5);
  }
  SUBCASE("non-finite gradient raises training divergence") {
    model::OptimizerState st(1, cfg);
    double p = 1.0, g = std::nan("");
    CHECK_THROWS_AS(model::adam_step(st, {{&p, &g, 1}}, 0.1),
                    std::runtime_error);
  }
  SUBCASE("state size mismatch") {
    model::OptimizerState st(3, cfg);
    double p = 1.0, g = 0.0;
    CHECK_THROWS_AS(model::adam_step(st, {{&p, &g, 1}}, 0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("cyclical learning rate") {
  model::ClrSchedule s{1e-8, 1e-3, 1000};
  CHECK(model::clr_lr(s, 0) == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK(model::clr_lr(s, 500) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(model::clr_lr(s, 1000) == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK(model::clr_lr(s, 1500) ==
        doctest::Approx(1e-8 + (1e-3 - 1e-8) / 2).epsilon(1e-12));
  CHECK(model::clr_lr(s, 2500) ==
        doctest::Approx(1e-8 + (1e-3 - 1e-8) / 4).epsilon(1e-12));
  for (std::uint64_t t = 0; t < 5000; ++t) {
    const double lr = model::clr_lr(s, t);
    CHECK(lr >= 1e-8);
    CHECK(lr <= 1e-3 + 1e-15);
  }
  CHECK_THROWS_AS(model::clr_lr({1e-3, 1e-3, 100}, 0), std::invalid_argument);
  CHECK_THROWS_AS(model::clr_lr({1e-8, 1e-3, 0}, 0), std::invalid_argument);
}

TEST_CASE("train with zero steps returns the initial model") {
  data::UtteranceBank bank = toy_bank(3, 2, 1.0);
  model::TrainerConfig tc;
  tc.feature_bins = 8;
  tc.hidden_dim = 8;
  tc.embed_dim = 4;
  tc.batch_size = 4;
  model::TrainPhaseConfig ph;
  ph.steps = 0;
  EmbeddingModel got = model::train(bank, tc, {ph}, 555);
  EmbeddingModel want = EmbeddingModel::init(
      8, 8, 4, 3, Rng(555).child_seed(streams::kInit));
  CHECK(got.frame_w == want.frame_w);
  CHECK(got.frame_b == want.frame_b);
  CHECK(got.proj_w == want.proj_w);
  CHECK(got.proj_b == want.proj_b);
  CHECK(got.centers.w == want.centers.w);
}

TEST_CASE("train input validation") {
  data::UtteranceBank one = data::UtteranceBank(toy_pool(1), 4000, 1.0, 0.05,
                                                2, 7);
  model::TrainerConfig tc;
  tc.feature_bins = 8;
  tc.hidden_dim = 8;
  tc.embed_dim = 4;
  model::TrainPhaseConfig ph;
  ph.steps = 1;
  CHECK_THROWS_AS(model::train(one, tc, {ph}, 1), std::invalid_argument);
  data::UtteranceBank bank = toy_bank(3, 2, 1.0);
  CHECK_THROWS_AS(model::train(bank, tc, {}, 1), std::invalid_argument);
}

TEST_CASE("training is bit-exact deterministic") {
  data::UtteranceBank bank = toy_bank(2, 2, 1.0);
  model::TrainerConfig tc;
  tc.feature_bins = 8;
  tc.hidden_dim = 8;
  tc.embed_dim = 4;
  tc.batch_size = 4;
  model::TrainPhaseConfig ph;
  ph.steps = 12;
  ph.crop_s = 0.5;
  ph.cycle_len = 6;
  ph.mixup = true;
  std::vector<model::TrainLogRow> log1, log2;
  EmbeddingModel a = model::train(bank, tc, {ph}, 99, &log1);
  EmbeddingModel b = model::train(bank, tc, {ph}, 99, &log2);
  CHECK(a.frame_w == b.frame_w);
  CHECK(a.proj_w == b.proj_w);
  CHECK(a.centers.w == b.centers.w);
  REQUIRE(log1.size() == log2.size());
  for (std::size_t i = 0; i < log1.size(); ++i) {
    CHECK(log1[i].step == log2[i].step);
    CHECK(log1[i].loss == log2[i].loss);
  }
  EmbeddingModel c = model::train(bank, tc, {ph}, 100);
  CHECK(a.frame_w != c.frame_w);
}

TEST_CASE("mixup and augmentation do not disturb the data stream") {
  data::UtteranceBank bank = toy_bank(3, 2, 1.0);
  model::TrainerConfig tc;
  tc.feature_bins = 8;
  tc.hidden_dim = 8;
  tc.embed_dim = 4;
  tc.batch_size = 4;

  auto trace_for = [&](bool mixup, bool augment, loss::LossFlags flags) {
    model::TrainerConfig t2 = tc;
    t2.loss_flags = flags;
    model::TrainPhaseConfig ph;
    ph.steps = 10;
    ph.crop_s = 0.5;
    ph.mixup = mixup;
    ph.augment = augment;
    std::vector<std::uint64_t> trace;
    model::train(bank, t2, {ph}, 41, nullptr, &trace);
    return trace;
  };

  const auto base = trace_for(false, false, {});
  REQUIRE(base.size() == 10);
  CHECK(trace_for(true, false, {}) == base);
  CHECK(trace_for(false, true, {}) == base);
  CHECK(trace_for(true, true, {}) == base);
  CHECK(trace_for(true, true, {true, false}) == base);
  CHECK(trace_for(true, true, {true, true}) == base);
}

TEST_CASE("loss trends down over a short run") {
  data::UtteranceBank bank = toy_bank(4, 3, 2.0);
  model::TrainerConfig tc;
  tc.feature_bins = 10;
  tc.hidden_dim = 12;
  tc.embed_dim = 6;
  tc.batch_size = 8;
  tc.log_every = 50;
  model::TrainPhaseConfig ph;
  ph.steps = 200;
  ph.crop_s = 1.0;
  ph.margin = 0.0;
  ph.augment = false;
  ph.cycle_len = 100;
  std::vector<model::TrainLogRow> log;
  model::train(bank, tc, {ph}, 17, &log);
  REQUIRE(log.size() >= 2);
  CHECK(log.front().loss > log.back().loss);
  for (const auto& row : log) CHECK(std::isfinite(row.loss));
}

TEST_CASE("twenty-speaker sanity run separates the training set") {
  data::UtteranceBank bank = toy_bank(20, 4, 2.0);
  model::TrainerConfig tc;
  tc.feature_bins = 16;
  tc.hidden_dim = 24;
  tc.embed_dim = 8;
  tc.batch_size = 16;
  model::TrainPhaseConfig ph;
  ph.steps = 2000;
  ph.crop_s = 2.0;
  ph.margin = 0.2;
  ph.cycle_len = 1000;
  ph.lr_max = 1e-3;
  EmbeddingModel m = model::train(bank, tc, {ph}, 23);

  int correct = 0, total = 0;
  for (std::size_t s = 0; s < bank.n_speakers(); ++s)
    for (int u = 0; u < bank.utts_per_speaker(); ++u) {
      Embedding e = eval::embed_waveform(m, bank.get(s, u), 25.0, 10.0);
      std::size_t best = 0;
      double best_cos = -2.0;
      for (std::size_t j = 0; j < m.centers.n_classes; ++j) {
        Embedding c(m.centers.center(j), m.centers.center(j) + m.embed_dim);
        const double sc = eval::cosine_score(e, c);
        if (sc > best_cos) {
          best_cos = sc;
          best = j;
        }
      }
      total += 1;
      if (best == s) correct += 1;
    }
  CHECK(total == 80);
  CHECK(static_cast<double>(correct) / total > 0.9);
}

TEST_CASE("checkpoint round-trip is exact") {
  EmbeddingModel m = EmbeddingModel::init(6, 8, 4, 5, 77);
  Rng r(78);
  for (double& b : m.frame_b) b = r.uniform(-1, 1);
  for (double& b : m.proj_b) b = r.uniform(-1, 1);
  const std::string path = tmp_path("svmix_ckpt_test.bin");
  model::save_model(path, m);
  EmbeddingModel l = model::load_model(path);
  CHECK(l.feat_dim == m.feat_dim);
  CHECK(l.hidden_dim == m.hidden_dim);
  CHECK(l.embed_dim == m.embed_dim);
  CHECK(l.frame_w == m.frame_w);
  CHECK(l.frame_b == m.frame_b);
  CHECK(l.proj_w == m.proj_w);
  CHECK(l.proj_b == m.proj_b);
  CHECK(l.centers.w == m.centers.w);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const std::string bad = tmp_path("svmix_ckpt_bad.bin");
  {
    std::ofstream f(bad, std::ios::binary);
    f << "not a checkpoint at all";
  }
  CHECK_THROWS_AS(model::load_model(bad), std::runtime_error);
  std::filesystem::remove(bad);

  EmbeddingModel m = EmbeddingModel::init(4, 4, 2, 3, 5);
  const std::string trunc = tmp_path("svmix_ckpt_trunc.bin");
  model::save_model(trunc, m);
  const auto size = std::filesystem::file_size(trunc);
  std::filesystem::resize_file(trunc, size - 10);
  CHECK_THROWS_AS(model::load_model(trunc), std::runtime_error);
  std::filesystem::remove(trunc);

  CHECK_THROWS_AS(model::load_model(tmp_path("svmix_no_such_file.bin")),
                  std::runtime_error);
}

TEST_CASE("train log file format") {
  const std::string path = tmp_path("svmix_train_log.csv");
  model::write_train_log(path, {{0, 1e-8, 2.5}, {50, 5e-4, 1.25}});
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  CHECK(line == "step,lr,loss");
  std::getline(f, line);
  CHECK(line.substr(0, 2) == "0,");
  int rows = 1;
  while (std::getline(f, line))
    if (!line.empty()) rows += 1;
  CHECK(rows == 2);
  std::filesystem::remove(path);
}
