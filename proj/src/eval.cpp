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

#include "svmix/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "svmix/features.hpp"
#include "svmix/kernels.hpp"
#include "svmix/mixup.hpp"
#include "svmix/rng.hpp"

namespace svmix::eval {

std::vector<Trial> build_trials(std::size_t n_speakers, int utts_per_speaker,
                                std::size_t n_target, std::size_t n_nontarget,
                                std::optional<std::pair<double, double>> overlap,
                                std::uint64_t seed) {
  if (n_speakers < 2)
    throw std::invalid_argument("build_trials: need at least 2 speakers");
  if (utts_per_speaker < 2)
    throw std::invalid_argument("build_trials: need at least 2 utterances per speaker");
  if (overlap) {
    if (n_speakers < 3)
      throw std::invalid_argument(
          "build_trials: overlap needs at least 3 speakers for a disjoint interferer");
    if (overlap->first > overlap->second)
      throw std::invalid_argument("build_trials: bad SNR range");
  }

  const Rng root(seed);
  const auto n_utt = static_cast<std::uint64_t>(utts_per_speaker);

  std::vector<Trial> trials;
  trials.reserve(n_target + n_nontarget);

  Rng trng = root.child(streams::kTrials);
  for (std::size_t k = 0; k < n_target; ++k) {
    Trial t;
    t.is_target = true;
    t.enroll.speaker = static_cast<std::size_t>(trng.uniform_int(n_speakers));
    t.test.speaker = t.enroll.speaker;
    t.enroll.utt = static_cast<int>(trng.uniform_int(n_utt));
    int u2 = static_cast<int>(trng.uniform_int(n_utt - 1));
    if (u2 >= t.enroll.utt) ++u2;  // distinct utterances
    t.test.utt = u2;
    trials.push_back(t);
  }
  for (std::size_t k = 0; k < n_nontarget; ++k) {
    Trial t;
    t.is_target = false;
    t.enroll.speaker = static_cast<std::size_t>(trng.uniform_int(n_speakers));
    auto s2 = static_cast<std::size_t>(trng.uniform_int(n_speakers - 1));
    if (s2 >= t.enroll.speaker) ++s2;  // distinct speakers
    t.test.speaker = s2;
    t.enroll.utt = static_cast<int>(trng.uniform_int(n_utt));
    t.test.utt = static_cast<int>(trng.uniform_int(n_utt));
    trials.push_back(t);
  }

  if (overlap) {
    Rng orng = root.child(streams::kOverlap);
    for (Trial& t : trials) {
      std::size_t e1 = t.enroll.speaker, e2 = t.test.speaker;
      if (e1 > e2) std::swap(e1, e2);
      const std::size_t n_excl = (e1 == e2) ? 1 : 2;
      auto s = static_cast<std::size_t>(orng.uniform_int(n_speakers - n_excl));
      if (s >= e1) ++s;
      if (n_excl == 2 && s >= e2) ++s;
      Interferer f;
      f.utt.speaker = s;
      f.utt.utt = static_cast<int>(orng.uniform_int(n_utt));
      f.snr_db = orng.uniform(overlap->first, overlap->second);
      t.interferer = f;
    }
  }
  return trials;
}

double cosine_score(const Embedding& e1, const Embedding& e2) {
  if (e1.size() != e2.size())
    throw std::invalid_argument("cosine_score: dimension mismatch");
  const double n1 = std::sqrt(kern::sumsq(e1.data(), e1.size()));
  const double n2 = std::sqrt(kern::sumsq(e2.data(), e2.size()));
  if (n1 == 0.0 || n2 == 0.0)
    throw std::domain_error("cosine_score: zero embedding");
  return kern::dot(e1.data(), e2.data(), e1.size()) / (n1 * n2);
}

namespace {

// mean/std of the top-K cohort scores against one embedding
bool side_stats(const Embedding& e, const Cohort& cohort, double* mu,
                double* sd) {
  std::vector<double> s(cohort.means.size());
  for (std::size_t i = 0; i < cohort.means.size(); ++i)
    s[i] = cosine_score(e, cohort.means[i]);
  std::sort(s.begin(), s.end(), std::greater<double>());
  s.resize(cohort.top_k);
  const double m = kern::sum(s.data(), s.size()) / static_cast<double>(s.size());
  const double var =
      kern::sumsq_centered(s.data(), s.size(), m) / static_cast<double>(s.size());
  *mu = m;
  *sd = std::sqrt(var > 0.0 ? var : 0.0);
  return *sd > 1e-12;
}

}  // namespace

double adaptive_snorm(double raw, const Embedding& e_enroll,
                      const Embedding& e_test, const Cohort& cohort,
                      bool* fallback) {
  if (cohort.means.empty())
    throw std::invalid_argument("adaptive_snorm: empty cohort");
  if (cohort.top_k < 1 || cohort.top_k > cohort.means.size())
    throw std::invalid_argument("adaptive_snorm: K_top outside [1, cohort size]");

  double mu_e, sd_e, mu_t, sd_t;
  const bool ok_e = side_stats(e_enroll, cohort, &mu_e, &sd_e);
  const bool ok_t = side_stats(e_test, cohort, &mu_t, &sd_t);
  if (!ok_e || !ok_t) {
    if (fallback) *fallback = true;
    return raw;
  }
  return 0.5 * ((raw - mu_e) / sd_e + (raw - mu_t) / sd_t);
}

std::pair<double, double> compute_eer(
    const std::vector<double>& target_scores,
    const std::vector<double>& nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw std::invalid_argument("compute_eer: empty score list");

  std::vector<double> tg = target_scores;
  std::vector<double> nt = nontarget_scores;
  std::sort(tg.begin(), tg.end());
  std::sort(nt.begin(), nt.end());

  std::vector<double> cand;
  cand.reserve(tg.size() + nt.size() + 1);
  cand.insert(cand.end(), tg.begin(), tg.end());
  cand.insert(cand.end(), nt.begin(), nt.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  // sentinel above every score: FAR 0, FRR 1
  cand.push_back(cand.back() + 1.0);

  const double n_tg = static_cast<double>(tg.size());
  const double n_nt = static_cast<double>(nt.size());

  double prev_far = 1.0, prev_frr = 0.0, prev_thr = cand.front();
  for (const double t : cand) {
    // accept iff score >= t
    const double far =
        static_cast<double>(nt.end() -
                            std::lower_bound(nt.begin(), nt.end(), t)) /
        n_nt;
    const double frr =
        static_cast<double>(std::lower_bound(tg.begin(), tg.end(), t) -
                            tg.begin()) /
        n_tg;
    const double d = far - frr;
    if (d <= 0.0) {
      if (d == 0.0) return {far, t};
      const double d_prev = prev_far - prev_frr;
      const double alpha = d_prev / (d_prev - d);
      return {prev_far + alpha * (far - prev_far),
              prev_thr + alpha * (t - prev_thr)};
    }
    prev_far = far;
    prev_frr = frr;
    prev_thr = t;
  }
  return {0.0, cand.back()};  // unreachable: sentinel has d = -1
}

Embedding embed_waveform(const model::EmbeddingModel& m,
                         const signal::Waveform& w, double frame_ms,
                         double hop_ms) {
  feat::FeatureMatrix f =
      feat::extract_features(w, frame_ms, hop_ms, m.feat_dim);
  f = feat::mean_normalize(f);
  return model::forward(m, f);
}

Cohort build_cohort(const model::EmbeddingModel& m, data::UtteranceBank& bank,
                    std::size_t top_k, double frame_ms, double hop_ms) {
  Cohort c;
  c.top_k = top_k;
  c.means.reserve(bank.n_speakers());
  for (std::size_t s = 0; s < bank.n_speakers(); ++s) {
    Embedding mean(m.embed_dim, 0.0);
    for (int u = 0; u < bank.utts_per_speaker(); ++u) {
      const Embedding e = embed_waveform(m, bank.get(s, u), frame_ms, hop_ms);
      kern::axpy(1.0, e.data(), mean.data(), mean.size());
    }
    kern::scale(1.0 / static_cast<double>(bank.utts_per_speaker()),
                mean.data(), mean.size());
    c.means.push_back(std::move(mean));
  }
  return c;
}

EvalResult evaluate(const model::EmbeddingModel& m, data::UtteranceBank& bank,
                    const std::vector<Trial>& trials, const Cohort& cohort,
                    double frame_ms, double hop_ms) {
  if (trials.empty()) throw std::invalid_argument("evaluate: empty trial list");

  std::map<std::pair<std::size_t, int>, Embedding> cache;
  auto clean_embedding = [&](const UttRef& u) -> const Embedding& {
    const auto key = std::make_pair(u.speaker, u.utt);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache
               .emplace(key, embed_waveform(m, bank.get(u.speaker, u.utt),
                                            frame_ms, hop_ms))
               .first;
    return it->second;
  };

  EvalResult res;
  res.scores.reserve(trials.size());
  for (const Trial& t : trials) {
    const Embedding& e_enroll = clean_embedding(t.enroll);
    Embedding e_test;
    if (t.interferer) {
      const signal::Waveform mixed =
          mix::snr_mix(bank.get(t.test.speaker, t.test.utt),
                       bank.get(t.interferer->utt.speaker, t.interferer->utt.utt),
                       t.interferer->snr_db);
      e_test = embed_waveform(m, mixed, frame_ms, hop_ms);
    } else {
      e_test = clean_embedding(t.test);
    }

    ScoredTrial st;
    st.trial = t;
    st.raw = cosine_score(e_enroll, e_test);
    st.norm = cohort.means.empty()
                  ? st.raw
                  : adaptive_snorm(st.raw, e_enroll, e_test, cohort,
                                   &res.snorm_fallback);
    res.scores.push_back(std::move(st));
  }

  std::vector<double> tg_raw, nt_raw, tg_norm, nt_norm;
  for (const ScoredTrial& st : res.scores) {
    (st.trial.is_target ? tg_raw : nt_raw).push_back(st.raw);
    (st.trial.is_target ? tg_norm : nt_norm).push_back(st.norm);
  }
  std::tie(res.eer_raw, res.thr_raw) = compute_eer(tg_raw, nt_raw);
  std::tie(res.eer_norm, res.thr_norm) = compute_eer(tg_norm, nt_norm);
  return res;
}

std::vector<MixtureRow> dump_mixture_embeddings(
    const model::EmbeddingModel& m, data::UtteranceBank& bank,
    std::size_t speaker_a, std::size_t speaker_b,
    const std::vector<double>& snr_list, double frame_ms, double hop_ms) {
  const signal::Waveform& wa = bank.get(speaker_a, 0);
  const signal::Waveform& wb = bank.get(speaker_b, 0);

  std::vector<MixtureRow> rows;
  rows.push_back({"pure_a", 0.0, embed_waveform(m, wa, frame_ms, hop_ms)});
  rows.push_back({"pure_b", 0.0, embed_waveform(m, wb, frame_ms, hop_ms)});
  for (const double snr : snr_list) {
    const signal::Waveform mixed = mix::snr_mix(wa, wb, snr);
    rows.push_back({"mix", snr, embed_waveform(m, mixed, frame_ms, hop_ms)});
  }
  return rows;
}

namespace {

std::string utt_id(const data::UtteranceBank& bank, const UttRef& u) {
  return std::to_string(bank.profile(u.speaker).speaker_id) + "/" +
         std::to_string(u.utt);
}

UttRef parse_utt_id(const std::string& tok,
                    const std::map<int, std::size_t>& spk_index) {
  const auto slash = tok.find('/');
  if (slash == std::string::npos)
    throw std::runtime_error("trial manifest: bad utterance id '" + tok + "'");
  UttRef u;
  int spk_id;
  try {
    spk_id = std::stoi(tok.substr(0, slash));
    u.utt = std::stoi(tok.substr(slash + 1));
  } catch (const std::exception&) {
    throw std::runtime_error("trial manifest: bad utterance id '" + tok + "'");
  }
  const auto it = spk_index.find(spk_id);
  if (it == spk_index.end())
    throw std::runtime_error("trial manifest: unknown speaker id " +
                             std::to_string(spk_id));
  u.speaker = it->second;
  return u;
}

}  // namespace

void write_trials(const std::string& path, const std::vector<Trial>& trials,
                  const data::UtteranceBank& bank) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trials: cannot open " + path);
  char num[48];
  for (const Trial& t : trials) {
    f << (t.is_target ? '1' : '0') << ' ' << utt_id(bank, t.enroll) << ' '
      << utt_id(bank, t.test);
    if (t.interferer) {
      std::snprintf(num, sizeof num, " %.17g", t.interferer->snr_db);
      f << ' ' << utt_id(bank, t.interferer->utt) << num;
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write_trials: write failed");
}

std::vector<Trial> read_trials(const std::string& path,
                               const data::UtteranceBank& bank) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_trials: cannot open " + path);

  std::map<int, std::size_t> spk_index;
  for (std::size_t i = 0; i < bank.n_speakers(); ++i)
    spk_index[bank.profile(i).speaker_id] = i;

  std::vector<Trial> trials;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string label, enroll, test;
    if (!(is >> label >> enroll >> test) || (label != "0" && label != "1"))
      throw std::runtime_error("read_trials: malformed line " +
                               std::to_string(lineno));
    Trial t;
    t.is_target = label == "1";
    t.enroll = parse_utt_id(enroll, spk_index);
    t.test = parse_utt_id(test, spk_index);
    std::string intf;
    if (is >> intf) {
      double snr;
      if (!(is >> snr))
        throw std::runtime_error("read_trials: missing snr_db at line " +
                                 std::to_string(lineno));
      t.interferer = Interferer{parse_utt_id(intf, spk_index), snr};
    }
    trials.push_back(t);
  }
  return trials;
}

void write_scores(const std::string& path, const ScoreSet& scores,
                  const data::UtteranceBank& bank) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_scores: cannot open " + path);
  f << "enroll,test,label,raw,norm\n";
  char num[80];
  for (const ScoredTrial& st : scores) {
    std::snprintf(num, sizeof num, ",%d,%.17g,%.17g\n",
                  st.trial.is_target ? 1 : 0, st.raw, st.norm);
    f << utt_id(bank, st.trial.enroll) << ',' << utt_id(bank, st.trial.test)
      << num;
  }
  if (!f) throw std::runtime_error("write_scores: write failed");
}

void write_mixture_csv(const std::string& path,
                       const std::vector<MixtureRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_mixture_csv: cannot open " + path);
  f << "kind,snr_db";
  if (!rows.empty())
    for (std::size_t d = 0; d < rows[0].e.size(); ++d) f << ",e" << d;
  f << '\n';
  char num[40];
  for (const MixtureRow& r : rows) {
    f << r.kind << ',';
    if (r.kind == "mix") {
      std::snprintf(num, sizeof num, "%.17g", r.snr_db);
      f << num;
    }
    for (const double v : r.e) {
      std::snprintf(num, sizeof num, ",%.17g", v);
      f << num;
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write_mixture_csv: write failed");
}

}  // namespace svmix::eval
