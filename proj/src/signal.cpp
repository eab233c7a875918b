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

#include "svmix/signal.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "svmix/kernels.hpp"
#include "svmix/rng.hpp"

namespace svmix::signal {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRmsLo = 0.05;
constexpr double kRmsHi = 0.95;

}  // namespace

double Waveform::rms() const {
  if (samples.empty()) return 0.0;
  return std::sqrt(kern::sumsq(samples.data(), samples.size()) /
                   static_cast<double>(samples.size()));
}

Waveform synth_utterance(const SpeakerProfile& profile, double duration_s,
                         int sample_rate, double noise_floor,
                         std::uint64_t seed) {
  if (sample_rate <= 0) throw std::invalid_argument("synth_utterance: sample_rate must be positive");
  if (!(duration_s > 0.0)) throw std::invalid_argument("synth_utterance: duration must be positive");
  if (noise_floor < 0.0) throw std::invalid_argument("synth_utterance: noise_floor must be non-negative");
  const double nyquist = sample_rate / 2.0;

  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  if (n == 0) throw std::invalid_argument("synth_utterance: duration rounds to zero samples");

  Rng rng(seed);
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(n, 0.0);

  // One factor per utterance: jittering the fundamental moves every
  // component together, so component spacings keep their ratios.
  const double jfac = 1.0 + profile.fundamental_jitter * rng.normal();

  for (const auto& c : profile.components) {
    if (!(c.amp > 0.0))
      throw std::invalid_argument("synth_utterance: component amplitude must be positive");
    if (!(c.freq_hz > 0.0) || c.freq_hz >= nyquist)
      throw std::invalid_argument("synth_utterance: component frequency outside (0, Nyquist)");
    // jitter is a perturbation, not part of the validated profile: clamp a
    // rare overshoot back into band instead of failing the utterance
    double f = std::min(std::max(c.freq_hz * jfac, 1e-3),
                        nyquist * (1.0 - 1e-9));
    const double phase = rng.uniform(0.0, 2.0 * kPi);

    // phasor recurrence, renormalized periodically against drift
    const std::complex<double> rot(std::cos(2.0 * kPi * f / sample_rate),
                                   std::sin(2.0 * kPi * f / sample_rate));
    std::complex<double> ph(std::cos(phase), std::sin(phase));
    for (std::size_t t = 0; t < n; ++t) {
      out.samples[t] += c.amp * ph.imag();
      ph *= rot;
      if ((t & 0xfffu) == 0xfffu) ph /= std::abs(ph);
    }
  }

  if (noise_floor > 0.0) {
    for (std::size_t t = 0; t < n; ++t)
      out.samples[t] += noise_floor * rng.normal();
  }

  const double level = out.rms();
  if (level > kRmsHi) {
    kern::scale(kRmsHi / level, out.samples.data(), n);
  } else if (level > 0.0 && level < kRmsLo) {
    kern::scale(kRmsLo / level, out.samples.data(), n);
  }
  return out;
}

Waveform random_crop(const Waveform& w, double crop_s, std::uint64_t seed) {
  if (w.samples.empty()) throw std::invalid_argument("random_crop: empty waveform");
  if (!(crop_s > 0.0)) throw std::invalid_argument("random_crop: crop length must be positive");
  const std::size_t len = w.samples.size();
  std::size_t crop =
      static_cast<std::size_t>(std::llround(crop_s * w.sample_rate));
  if (crop == 0) crop = 1;

  const std::size_t copies = (crop + len - 1) / len;
  const std::size_t tiled = copies * len;

  Rng rng(seed);
  const std::size_t offset =
      static_cast<std::size_t>(rng.uniform_int(tiled - crop + 1));

  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(crop);
  for (std::size_t i = 0; i < crop; ++i)
    out.samples[i] = w.samples[(offset + i) % len];
  return out;
}

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

void write_wav(const std::string& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw std::invalid_argument("write_wav: bad sample rate");
  const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_bytes = n * 2;

  std::string buf;
  buf.reserve(44 + data_bytes);
  buf += "RIFF";
  put_u32(buf, 36 + data_bytes);
  buf += "WAVE";
  buf += "fmt ";
  put_u32(buf, 16);
  put_u16(buf, 1);  // PCM
  put_u16(buf, 1);  // mono
  put_u32(buf, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(buf, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(buf, 2);   // block align
  put_u16(buf, 16);  // bits per sample
  buf += "data";
  put_u32(buf, data_bytes);
  for (double x : w.samples) {
    double v = x;
    if (v > 1.0) v = 1.0;
    if (v < -1.0) v = -1.0;
    auto q = static_cast<int>(std::lrint(v * 32767.0));
    put_u16(buf, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path);
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

Waveform read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_wav: cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0)
    throw std::runtime_error("read_wav: not a RIFF/WAVE file: " + path);

  int sample_rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const char* id = buf.data() + pos;
    const std::uint32_t sz = get_u32(p + pos + 4);
    pos += 8;
    if (pos + sz > buf.size())
      throw std::runtime_error("read_wav: truncated chunk in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (sz < 16) throw std::runtime_error("read_wav: short fmt chunk");
      if (get_u16(p + pos) != 1 || get_u16(p + pos + 2) != 1 ||
          get_u16(p + pos + 14) != 16)
        throw std::runtime_error("read_wav: only 16-bit PCM mono supported");
      sample_rate = static_cast<int>(get_u32(p + pos + 4));
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw std::runtime_error("read_wav: data before fmt");
      Waveform out;
      out.sample_rate = sample_rate;
      out.samples.resize(sz / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        auto v = static_cast<std::int16_t>(get_u16(p + pos + 2 * i));
        out.samples[i] = static_cast<double>(v) / 32767.0;
      }
      return out;
    }
    pos += sz + (sz & 1);  // chunks are word-aligned
  }
  throw std::runtime_error("read_wav: no data chunk in " + path);
}

void write_speaker_manifest(const std::string& path,
                            const std::vector<SpeakerProfile>& pool) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_speaker_manifest: cannot open " + path);
  char num[64];
  for (const auto& s : pool) {
    f << s.speaker_id;
    for (const auto& c : s.components) {
      std::snprintf(num, sizeof num, " %.17g:%.17g", c.freq_hz, c.amp);
      f << num;
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write_speaker_manifest: write failed");
}

std::vector<SpeakerProfile> read_speaker_manifest(const std::string& path,
                                                  double jitter) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_speaker_manifest: cannot open " + path);
  std::vector<SpeakerProfile> pool;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    SpeakerProfile s;
    s.fundamental_jitter = jitter;
    if (!(is >> s.speaker_id))
      throw std::runtime_error("read_speaker_manifest: bad speaker id at line " +
                               std::to_string(lineno));
    std::string tok;
    while (is >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("read_speaker_manifest: bad component '" + tok +
                                 "' at line " + std::to_string(lineno));
      SpectralComponent c;
      try {
        c.freq_hz = std::stod(tok.substr(0, colon));
        c.amp = std::stod(tok.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("read_speaker_manifest: bad component '" + tok +
                                 "' at line " + std::to_string(lineno));
      }
      s.components.push_back(c);
    }
    if (s.components.empty())
      throw std::runtime_error("read_speaker_manifest: speaker without components at line " +
                               std::to_string(lineno));
    pool.push_back(std::move(s));
  }
  return pool;
}

}  // namespace svmix::signal
