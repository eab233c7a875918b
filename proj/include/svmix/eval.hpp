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

#ifndef SVMIX_EVAL_HPP
#define SVMIX_EVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svmix/data.hpp"
#include "svmix/model.hpp"

namespace svmix::eval {

struct UttRef {
  std::size_t speaker = 0;  // bank index
  int utt = 0;
};

struct Interferer {
  UttRef utt;
  double snr_db = 0.0;
};

struct Trial {
  UttRef enroll;
  UttRef test;
  bool is_target = false;
  std::optional<Interferer> interferer;  // mixed into the test side only
};

struct ScoredTrial {
  Trial trial;
  double raw = 0.0;
  double norm = 0.0;
};

using ScoreSet = std::vector<ScoredTrial>;

// Per-speaker mean embeddings of the training pool.
struct Cohort {
  std::vector<Embedding> means;
  std::size_t top_k = 0;
};

// Balanced trial construction over one speaker pool: n_target same-speaker
// pairs (distinct utterances) followed by n_nontarget cross-speaker pairs.
// With `overlap` = [lo, hi], every trial's test side gets an interferer
// drawn from the pool speakers distinct from both sides, at an SNR uniform
// in the range. The base trial draws do not depend on whether overlap is
// requested, so clean and overlapped sets share trial pairs.
std::vector<Trial> build_trials(std::size_t n_speakers, int utts_per_speaker,
                                std::size_t n_target, std::size_t n_nontarget,
                                std::optional<std::pair<double, double>> overlap,
                                std::uint64_t seed);

double cosine_score(const Embedding& e1, const Embedding& e2);

// 1/2 [(raw - mean(S_e))/std(S_e) + (raw - mean(S_t))/std(S_t)] over the
// top-K cohort scores per side; population std with a 1e-12 guard. On zero
// cohort variance returns raw and sets *fallback.
double adaptive_snorm(double raw, const Embedding& e_enroll,
                      const Embedding& e_test, const Cohort& cohort,
                      bool* fallback = nullptr);

// Sweeps all distinct scores (accept iff score >= threshold) and linearly
// interpolates the FAR/FRR crossing.
std::pair<double, double> compute_eer(const std::vector<double>& target_scores,
                                      const std::vector<double>& nontarget_scores);

struct EvalResult {
  double eer_raw = 0.0;
  double eer_norm = 0.0;
  double thr_raw = 0.0;
  double thr_norm = 0.0;
  ScoreSet scores;
  bool snorm_fallback = false;
};

Embedding embed_waveform(const model::EmbeddingModel& m,
                         const signal::Waveform& w, double frame_ms,
                         double hop_ms);

Cohort build_cohort(const model::EmbeddingModel& m, data::UtteranceBank& bank,
                    std::size_t top_k, double frame_ms, double hop_ms);

// Scores every trial (snr_mix applied to overlapped test sides first) and
// computes raw and s-normalized EERs. An empty cohort disables
// normalization (norm = raw).
EvalResult evaluate(const model::EmbeddingModel& m, data::UtteranceBank& bank,
                    const std::vector<Trial>& trials, const Cohort& cohort,
                    double frame_ms, double hop_ms);

struct MixtureRow {
  std::string kind;  // "pure_a", "pure_b", "mix"
  double snr_db = 0.0;
  Embedding e;
};

// Embeddings of the two pure utterances (index 0 of each speaker) and of
// their mixtures at each SNR.
std::vector<MixtureRow> dump_mixture_embeddings(const model::EmbeddingModel& m,
                                                data::UtteranceBank& bank,
                                                std::size_t speaker_a,
                                                std::size_t speaker_b,
                                                const std::vector<double>& snr_list,
                                                double frame_ms, double hop_ms);

// Text manifest, one trial per line: `label enroll_id test_id [interferer_id
// snr_db]` with label 1/0 and utterance ids `speaker_id/utt_index`.
void write_trials(const std::string& path, const std::vector<Trial>& trials,
                  const data::UtteranceBank& bank);
std::vector<Trial> read_trials(const std::string& path,
                               const data::UtteranceBank& bank);

// CSV `enroll,test,label,raw,norm`.
void write_scores(const std::string& path, const ScoreSet& scores,
                  const data::UtteranceBank& bank);

void write_mixture_csv(const std::string& path,
                       const std::vector<MixtureRow>& rows);

}  // namespace svmix::eval

#endif  // SVMIX_EVAL_HPP
