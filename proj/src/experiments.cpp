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

#include "svmix/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "svmix/rng.hpp"

namespace svmix::exp {

namespace {

enum class Kind { kInt, kSize, kDouble, kBool, kGrid };

struct Binding {
  const char* key;
  Kind kind;
  void* p;
};

std::vector<Binding> bindings(ExperimentConfig& c) {
  return {
      {"adam_beta1", Kind::kDouble, &c.adam_beta1},
      {"adam_beta2", Kind::kDouble, &c.adam_beta2},
      {"adam_eps", Kind::kDouble, &c.adam_eps},
      {"amp_max", Kind::kDouble, &c.amp_max},
      {"amp_min", Kind::kDouble, &c.amp_min},
      {"batch_size", Kind::kSize, &c.batch_size},
      {"beta_grid", Kind::kGrid, &c.beta_grid},
      {"components_max", Kind::kSize, &c.components_max},
      {"components_min", Kind::kSize, &c.components_min},
      {"embed_dim", Kind::kSize, &c.embed_dim},
      {"eval_snr_hi", Kind::kDouble, &c.eval_snr_hi},
      {"eval_snr_lo", Kind::kDouble, &c.eval_snr_lo},
      {"eval_utt_seconds", Kind::kDouble, &c.eval_utt_seconds},
      {"eval_utts_per_speaker", Kind::kInt, &c.eval_utts_per_speaker},
      {"feature_bins", Kind::kSize, &c.feature_bins},
      {"frame_ms", Kind::kDouble, &c.frame_ms},
      {"freq_mask_max", Kind::kSize, &c.freq_mask_max},
      {"freq_max_hz", Kind::kDouble, &c.freq_max_hz},
      {"freq_min_hz", Kind::kDouble, &c.freq_min_hz},
      {"fundamental_jitter", Kind::kDouble, &c.fundamental_jitter},
      {"hidden_dim", Kind::kSize, &c.hidden_dim},
      {"hop_ms", Kind::kDouble, &c.hop_ms},
      {"log_every", Kind::kSize, &c.log_every},
      {"loss_scale", Kind::kDouble, &c.loss_scale},
      {"lr_min", Kind::kDouble, &c.lr_min},
      {"mixup_alpha", Kind::kDouble, &c.mixup_alpha},
      {"mixup_beta", Kind::kDouble, &c.mixup_beta},
      {"n_eval_speakers", Kind::kSize, &c.n_eval_speakers},
      {"n_nontarget_trials", Kind::kSize, &c.n_nontarget_trials},
      {"n_target_trials", Kind::kSize, &c.n_target_trials},
      {"n_train_speakers", Kind::kSize, &c.n_train_speakers},
      {"noise_floor", Kind::kDouble, &c.noise_floor},
      {"phase1_augment", Kind::kBool, &c.phase1_augment},
      {"phase1_crop_s", Kind::kDouble, &c.phase1_crop_s},
      {"phase1_cycle_len", Kind::kSize, &c.phase1_cycle_len},
      {"phase1_lr_max", Kind::kDouble, &c.phase1_lr_max},
      {"phase1_margin", Kind::kDouble, &c.phase1_margin},
      {"phase1_steps", Kind::kSize, &c.phase1_steps},
      {"phase2_augment", Kind::kBool, &c.phase2_augment},
      {"phase2_crop_s", Kind::kDouble, &c.phase2_crop_s},
      {"phase2_cycle_len", Kind::kSize, &c.phase2_cycle_len},
      {"phase2_lr_max", Kind::kDouble, &c.phase2_lr_max},
      {"phase2_margin", Kind::kDouble, &c.phase2_margin},
      {"phase2_steps", Kind::kSize, &c.phase2_steps},
      {"sample_rate", Kind::kInt, &c.sample_rate},
      {"snorm_top_k", Kind::kSize, &c.snorm_top_k},
      {"snr_grid", Kind::kGrid, &c.snr_grid},
      {"time_mask_max", Kind::kSize, &c.time_mask_max},
      {"train_utt_seconds", Kind::kDouble, &c.train_utt_seconds},
      {"train_utts_per_speaker", Kind::kInt, &c.train_utts_per_speaker},
      {"weight_decay", Kind::kDouble, &c.weight_decay},
  };
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  double x = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw std::invalid_argument("bad numeric value '" + v + "'");
  return x;
}

long long to_ll(const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  long long x = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0')
    throw std::invalid_argument("bad integer value '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "0" || v == "false") return false;
  if (v == "1" || v == "true") return true;
  throw std::invalid_argument("bad boolean value '" + v + "' (use 0/1)");
}

std::vector<double> to_grid(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw std::invalid_argument("empty element in list '" + v + "'");
    out.push_back(to_double(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list value");
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string fmt_grid(const std::vector<double>& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ',';
    out += fmt17(g[i]);
  }
  return out;
}

std::string set_label(std::optional<std::pair<double, double>> overlap) {
  if (!overlap) return "clean";
  if (overlap->first == overlap->second) return "snr_" + fmt_g(overlap->first);
  return "overlap_" + fmt_g(overlap->first) + "_" + fmt_g(overlap->second);
}

}  // namespace

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  auto bs = bindings(*this);
  auto it = std::find_if(bs.begin(), bs.end(),
                         [&](const Binding& b) { return key == b.key; });
  if (it == bs.end())
    throw std::invalid_argument("unknown config key '" + key + "'");
  switch (it->kind) {
    case Kind::kInt: {
      long long x = to_ll(value);
      if (x < 0 || x > 1u << 30)
        throw std::invalid_argument("value out of range for '" + key + "'");
      *static_cast<int*>(it->p) = static_cast<int>(x);
      break;
    }
    case Kind::kSize: {
      long long x = to_ll(value);
      if (x < 0)
        throw std::invalid_argument("value out of range for '" + key + "'");
      *static_cast<std::size_t*>(it->p) = static_cast<std::size_t>(x);
      break;
    }
    case Kind::kDouble:
      *static_cast<double*>(it->p) = to_double(value);
      break;
    case Kind::kBool:
      *static_cast<bool*>(it->p) = to_bool(value);
      break;
    case Kind::kGrid:
      *static_cast<std::vector<double>*>(it->p) = to_grid(value);
      break;
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.resize(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      cfg.apply(key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return cfg;
}

std::string ExperimentConfig::canonical() const {
  auto bs = bindings(const_cast<ExperimentConfig&>(*this));
  std::sort(bs.begin(), bs.end(), [](const Binding& a, const Binding& b) {
    return std::string_view(a.key) < std::string_view(b.key);
  });
  std::string out;
  for (const Binding& b : bs) {
    out += b.key;
    out += '=';
    switch (b.kind) {
      case Kind::kInt:
        out += std::to_string(*static_cast<const int*>(b.p));
        break;
      case Kind::kSize:
        out += std::to_string(*static_cast<const std::size_t*>(b.p));
        break;
      case Kind::kDouble:
        out += fmt17(*static_cast<const double*>(b.p));
        break;
      case Kind::kBool:
        out += *static_cast<const bool*>(b.p) ? '1' : '0';
        break;
      case Kind::kGrid:
        out += fmt_grid(*static_cast<const std::vector<double>*>(b.p));
        break;
    }
    out += '\n';
  }
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  std::string c = canonical();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : c) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
  };
  if (n_train_speakers < 2) fail("n_train_speakers must be >= 2");
  if (n_eval_speakers < 3) fail("n_eval_speakers must be >= 3");
  if (components_min < 1 || components_min > components_max)
    fail("need 1 <= components_min <= components_max");
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (!(freq_min_hz > 0.0) || !(freq_min_hz < freq_max_hz) ||
      !(freq_max_hz < sample_rate / 2.0))
    fail("need 0 < freq_min_hz < freq_max_hz < Nyquist");
  if (!(amp_min > 0.0) || !(amp_min <= amp_max))
    fail("need 0 < amp_min <= amp_max");
  if (!(fundamental_jitter >= 0.0)) fail("fundamental_jitter must be >= 0");
  if (!(noise_floor >= 0.0)) fail("noise_floor must be >= 0");
  if (!(train_utt_seconds > 0.0) || !(eval_utt_seconds > 0.0))
    fail("utterance durations must be positive");
  if (train_utts_per_speaker < 1) fail("train_utts_per_speaker must be >= 1");
  if (eval_utts_per_speaker < 2) fail("eval_utts_per_speaker must be >= 2");
  if (!(frame_ms > 0.0) || !(hop_ms > 0.0))
    fail("frame_ms and hop_ms must be positive");
  if (feature_bins < 1) fail("feature_bins must be >= 1");
  if (embed_dim < 2) fail("embed_dim must be >= 2");
  if (hidden_dim < embed_dim) fail("hidden_dim must be >= embed_dim");
  if (batch_size < 2) fail("batch_size must be >= 2");
  if (!(loss_scale > 0.0)) fail("loss_scale must be positive");
  if (!(lr_min >= 0.0)) fail("lr_min must be >= 0");
  if (!(mixup_alpha > 0.0) || !(mixup_beta > 0.0))
    fail("mixup_alpha and mixup_beta must be positive");
  if (phase1_steps < 1) fail("phase1_steps must be >= 1");
  if (phase1_cycle_len < 1 || phase2_cycle_len < 1)
    fail("cycle lengths must be >= 1");
  if (!(phase1_crop_s > 0.0) || !(phase2_crop_s > 0.0))
    fail("crop lengths must be positive");
  if (!(phase1_margin >= 0.0) || !(phase2_margin >= 0.0))
    fail("margins must be >= 0");
  if (!(phase1_lr_max >= lr_min) || !(phase2_lr_max >= lr_min))
    fail("lr_max must be >= lr_min");
  if (n_target_trials < 1 || n_nontarget_trials < 1)
    fail("trial counts must be >= 1");
  if (snorm_top_k < 1) fail("snorm_top_k must be >= 1");
  if (!(eval_snr_lo <= eval_snr_hi)) fail("need eval_snr_lo <= eval_snr_hi");
  if (snr_grid.empty() || beta_grid.empty())
    fail("snr_grid and beta_grid must be non-empty");
  for (double a : beta_grid)
    if (!(a > 0.0)) fail("beta_grid entries must be positive");
  if (log_every < 1) fail("log_every must be >= 1");
}

const ResultRow& ResultTable::find(const std::string& system,
                                   const std::string& test_set) const {
  for (const ResultRow& r : rows)
    if (r.system == system && r.test_set == test_set) return r;
  throw std::out_of_range("no result row " + system + "/" + test_set);
}

std::string to_csv(const ResultTable& t) {
  std::string out = "system,test_set,eer,eer_raw\n";
  for (const ResultRow& r : t.rows) {
    out += r.system;
    out += ',';
    out += r.test_set;
    out += ',';
    out += fmt17(r.eer);
    out += ',';
    out += fmt17(r.eer_raw);
    out += '\n';
  }
  return out;
}

ResultTable parse_csv(const std::string& csv) {
  std::stringstream ss(csv);
  std::string line;
  if (!std::getline(ss, line) || trim(line) != "system,test_set,eer,eer_raw")
    throw std::runtime_error("result csv: bad header");
  ResultTable t;
  std::size_t lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string f[4];
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ls, f[i], ','))
        throw std::runtime_error("result csv line " + std::to_string(lineno) +
                                 ": expected 4 fields");
    }
    std::string extra;
    if (std::getline(ls, extra))
      throw std::runtime_error("result csv line " + std::to_string(lineno) +
                               ": expected 4 fields");
    ResultRow r;
    r.system = f[0];
    r.test_set = f[1];
    r.eer = to_double(f[2]);
    r.eer_raw = to_double(f[3]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_result_csv(const std::string& path, const ResultTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_csv(t);
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_meta(const std::string& path, const ResultTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(t.config_hash));
  out << "config_hash=" << buf << "\n";
  out << "seed=" << t.seed << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<signal::SpeakerProfile> gen_pool(const ExperimentConfig& cfg,
                                             std::uint64_t seed) {
  cfg.validate();
  Rng pr = Rng(seed).child(streams::kPool);
  std::size_t total = cfg.n_train_speakers + cfg.n_eval_speakers;
  std::vector<signal::SpeakerProfile> pool;
  pool.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    signal::SpeakerProfile p;
    p.speaker_id = static_cast<int>(i);
    p.fundamental_jitter = cfg.fundamental_jitter;
    std::size_t k = cfg.components_min +
                    pr.uniform_int(cfg.components_max - cfg.components_min + 1);
    p.components.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
      signal::SpectralComponent sc;
      if (c % 2 == 1) {
        // Beat partner a few Hz above the previous component: the pair's
        // band energy oscillates at the spacing frequency, a per-speaker
        // temporal signature that survives per-utterance mean removal.
        sc.freq_hz = std::min(p.components[c - 1].freq_hz + pr.uniform(2.0, 8.0),
                              cfg.freq_max_hz);
        sc.amp = pr.uniform(cfg.amp_min, cfg.amp_max);
      } else {
        sc.freq_hz = pr.uniform(cfg.freq_min_hz, cfg.freq_max_hz);
        sc.amp = pr.uniform(cfg.amp_min, cfg.amp_max);
      }
      p.components.push_back(sc);
    }
    pool.push_back(std::move(p));
  }
  return pool;
}

Banks make_banks(const ExperimentConfig& cfg, std::uint64_t seed) {
  auto pool = gen_pool(cfg, seed);
  std::vector<signal::SpeakerProfile> train_pool(
      pool.begin(), pool.begin() + static_cast<long>(cfg.n_train_speakers));
  std::vector<signal::SpeakerProfile> eval_pool(
      pool.begin() + static_cast<long>(cfg.n_train_speakers), pool.end());
  return Banks{
      data::UtteranceBank(std::move(train_pool), cfg.sample_rate,
                          cfg.train_utt_seconds, cfg.noise_floor,
                          cfg.train_utts_per_speaker, seed),
      data::UtteranceBank(std::move(eval_pool), cfg.sample_rate,
                          cfg.eval_utt_seconds, cfg.noise_floor,
                          cfg.eval_utts_per_speaker, seed),
  };
}

model::EmbeddingModel train_system(data::UtteranceBank& train_bank,
                                   const ExperimentConfig& cfg,
                                   std::uint64_t seed, const SystemSpec& spec,
                                   std::vector<model::TrainLogRow>* log,
                                   std::vector<std::uint64_t>* trace) {
  cfg.validate();
  model::TrainerConfig tc;
  tc.frame_ms = cfg.frame_ms;
  tc.hop_ms = cfg.hop_ms;
  tc.feature_bins = cfg.feature_bins;
  tc.hidden_dim = cfg.hidden_dim;
  tc.embed_dim = cfg.embed_dim;
  tc.batch_size = cfg.batch_size;
  tc.lr_min = cfg.lr_min;
  tc.loss_scale = cfg.loss_scale;
  tc.adam = {cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, cfg.weight_decay};
  tc.freq_mask_max = cfg.freq_mask_max;
  tc.time_mask_max = cfg.time_mask_max;
  tc.log_every = cfg.log_every;
  tc.loss_flags = spec.flags;

  std::vector<model::TrainPhaseConfig> phases;
  model::TrainPhaseConfig p1;
  p1.margin = cfg.phase1_margin;
  p1.crop_s = cfg.phase1_crop_s;
  p1.augment = cfg.phase1_augment;
  p1.lr_max = cfg.phase1_lr_max;
  p1.cycle_len = cfg.phase1_cycle_len;
  p1.steps = cfg.phase1_steps;
  p1.mixup = spec.mixup;
  p1.beta = spec.beta;
  phases.push_back(p1);
  if (cfg.phase2_steps > 0) {
    model::TrainPhaseConfig p2;
    p2.margin = cfg.phase2_margin;
    p2.crop_s = cfg.phase2_crop_s;
    p2.augment = cfg.phase2_augment;
    p2.lr_max = cfg.phase2_lr_max;
    p2.cycle_len = cfg.phase2_cycle_len;
    p2.steps = cfg.phase2_steps;
    p2.mixup = spec.mixup;
    p2.beta = spec.beta;
    phases.push_back(p2);
  }
  return model::train(train_bank, tc, phases,
                      Rng(seed).child_seed(streams::kTrain), log, trace);
}

eval::EvalResult eval_system(const model::EmbeddingModel& m, Banks& banks,
                             const ExperimentConfig& cfg, std::uint64_t seed,
                             std::optional<std::pair<double, double>> overlap) {
  cfg.validate();
  auto trials = eval::build_trials(banks.eval.n_speakers(),
                                   cfg.eval_utts_per_speaker,
                                   cfg.n_target_trials, cfg.n_nontarget_trials,
                                   overlap, seed);
  std::size_t top_k = std::min(cfg.snorm_top_k, banks.train.n_speakers());
  eval::Cohort cohort =
      eval::build_cohort(m, banks.train, top_k, cfg.frame_ms, cfg.hop_ms);
  return eval::evaluate(m, banks.eval, trials, cohort, cfg.frame_ms,
                        cfg.hop_ms);
}

namespace {

struct NamedSystem {
  std::string label;
  SystemSpec spec;
};

// Trains each system once and evaluates it on every requested trial set.
// Trial sets and the s-norm cohort are built once per system from the same
// master seed, so every system sees identical trials.
ResultTable run_systems(
    const ExperimentConfig& cfg, std::uint64_t seed,
    const std::vector<NamedSystem>& systems,
    const std::vector<std::optional<std::pair<double, double>>>& sets) {
  cfg.validate();
  Banks banks = make_banks(cfg, seed);
  std::vector<std::vector<eval::Trial>> trials;
  trials.reserve(sets.size());
  for (const auto& s : sets)
    trials.push_back(eval::build_trials(
        banks.eval.n_speakers(), cfg.eval_utts_per_speaker,
        cfg.n_target_trials, cfg.n_nontarget_trials, s, seed));
  std::size_t top_k = std::min(cfg.snorm_top_k, banks.train.n_speakers());

  ResultTable t;
  t.seed = seed;
  t.config_hash = cfg.hash();
  for (const NamedSystem& sys : systems) {
    model::EmbeddingModel m = train_system(banks.train, cfg, seed, sys.spec);
    eval::Cohort cohort =
        eval::build_cohort(m, banks.train, top_k, cfg.frame_ms, cfg.hop_ms);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      eval::EvalResult r = eval::evaluate(m, banks.eval, trials[i], cohort,
                                          cfg.frame_ms, cfg.hop_ms);
      t.rows.push_back(
          {sys.label, set_label(sets[i]), r.eer_norm, r.eer_raw});
    }
  }
  return t;
}

}  // namespace

ResultTable run_headline(const ExperimentConfig& cfg, std::uint64_t seed) {
  SystemSpec mm;
  mm.mixup = true;
  mm.beta = {cfg.mixup_alpha, cfg.mixup_beta};
  std::vector<NamedSystem> systems{{"baseline", SystemSpec{}},
                                   {"margin_mixup", mm}};
  std::vector<std::optional<std::pair<double, double>>> sets{
      std::nullopt, std::make_pair(cfg.eval_snr_lo, cfg.eval_snr_hi)};
  return run_systems(cfg, seed, systems, sets);
}

ResultTable run_ablation(const ExperimentConfig& cfg, std::uint64_t seed) {
  mix::BetaParams beta{cfg.mixup_alpha, cfg.mixup_beta};
  SystemSpec full{true, {}, beta};
  SystemSpec a{true, {true, false}, beta};
  SystemSpec b{true, {false, true}, beta};
  SystemSpec c{true, {true, true}, beta};
  std::vector<NamedSystem> systems{{"full", full},
                                   {"ablation_a", a},
                                   {"ablation_b", b},
                                   {"ablation_c", c}};
  std::vector<std::optional<std::pair<double, double>>> sets{
      std::nullopt, std::make_pair(cfg.eval_snr_lo, cfg.eval_snr_hi)};
  return run_systems(cfg, seed, systems, sets);
}

ResultTable run_beta_sweep(const ExperimentConfig& cfg,
                           const std::vector<double>& alphas,
                           std::uint64_t seed) {
  if (alphas.empty()) throw std::invalid_argument("beta sweep: empty grid");
  std::vector<NamedSystem> systems;
  for (double a : alphas) {
    if (!(a > 0.0))
      throw std::invalid_argument("beta sweep: alphas must be positive");
    SystemSpec s;
    s.mixup = true;
    s.beta = {a, a};
    systems.push_back({"alpha_" + fmt_g(a), s});
  }
  std::vector<std::optional<std::pair<double, double>>> sets{
      std::nullopt, std::make_pair(0.0, 0.0), std::make_pair(2.0, 2.0),
      std::make_pair(cfg.eval_snr_lo, cfg.eval_snr_hi)};
  return run_systems(cfg, seed, systems, sets);
}

ResultTable run_snr_sweep(const ExperimentConfig& cfg,
                          const std::vector<double>& snr_grid,
                          std::uint64_t seed) {
  if (snr_grid.empty()) throw std::invalid_argument("snr sweep: empty grid");
  SystemSpec mm;
  mm.mixup = true;
  mm.beta = {cfg.mixup_alpha, cfg.mixup_beta};
  std::vector<NamedSystem> systems{{"baseline", SystemSpec{}},
                                   {"margin_mixup", mm}};
  std::vector<std::optional<std::pair<double, double>>> sets;
  for (double v : snr_grid) sets.emplace_back(std::make_pair(v, v));
  return run_systems(cfg, seed, systems, sets);
}

}  // namespace svmix::exp
