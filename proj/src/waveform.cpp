#include "chansep/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace chansep::signal {

void validate(const Waveform& w) {
  if (w.samples.empty()) throw std::invalid_argument("waveform is empty");
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("waveform contains a non-finite sample");
  }
}

std::size_t frame_count(std::size_t total_len, std::size_t frame_len) {
  const std::size_t hop = frame_len / 2;
  const std::size_t tail = total_len > frame_len ? total_len - frame_len : 0;
  return (tail + hop - 1) / hop + 1;
}

FrameMatrix frame(const Waveform& w, std::size_t frame_len) {
  validate(w);
  if (frame_len < 2 || frame_len % 2 != 0) {
    throw std::invalid_argument("frame_len must be even and >= 2");
  }
  const std::size_t total = w.samples.size();
  FrameMatrix f;
  f.frame_len = frame_len;
  f.hop = frame_len / 2;
  f.num_frames = frame_count(total, frame_len);
  f.original_len = total;
  f.frames.assign(f.num_frames * frame_len, 0.0);
  for (std::size_t k = 0; k < f.num_frames; ++k) {
    const std::size_t start = k * f.hop;
    for (std::size_t j = 0; j < frame_len; ++j) {
      const std::size_t t = start + j;
      if (t < total) f.at(k, j) = w.samples[t];
    }
  }
  return f;
}

static void validate_frames(const FrameMatrix& f) {
  if (f.frame_len < 2 || f.frame_len % 2 != 0 || f.hop != f.frame_len / 2) {
    throw std::invalid_argument("frame matrix has invalid frame_len/hop");
  }
  if (f.original_len == 0) throw std::invalid_argument("frame matrix original_len is zero");
  if (f.num_frames != frame_count(f.original_len, f.frame_len)) {
    throw std::invalid_argument("frame matrix num_frames is inconsistent with original_len");
  }
  if (f.frames.size() != f.num_frames * f.frame_len) {
    throw std::invalid_argument("frame matrix storage size mismatch");
  }
}

Waveform overlap_add(const FrameMatrix& f, std::uint32_t sample_rate_hz) {
  validate_frames(f);
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.assign(f.original_len, 0.0);
  std::vector<std::uint32_t> count(f.original_len, 0);
  for (std::size_t k = 0; k < f.num_frames; ++k) {
    const std::size_t start = k * f.hop;
    for (std::size_t j = 0; j < f.frame_len; ++j) {
      const std::size_t t = start + j;
      if (t >= f.original_len) break;
      w.samples[t] += f.at(k, j);
      ++count[t];
    }
  }
  for (std::size_t t = 0; t < f.original_len; ++t) {
    w.samples[t] /= static_cast<double>(count[t]);
  }
  return w;
}

double energy(const std::vector<double>& samples) {
  double e = 0.0;
  for (double s : samples) e += s * s;
  return e;
}

double energy(const Waveform& w) { return energy(w.samples); }

double rms(const Waveform& w) {
  if (w.samples.empty()) return 0.0;
  return std::sqrt(energy(w) / static_cast<double>(w.samples.size()));
}

Waveform scale_to_snr(const Waveform& sig, const Waveform& ref, double snr_db) {
  validate(sig);
  validate(ref);
  if (sig.samples.size() != ref.samples.size()) {
    throw std::invalid_argument("scale_to_snr: length mismatch");
  }
  if (sig.sample_rate_hz != ref.sample_rate_hz) {
    throw std::invalid_argument("scale_to_snr: sample rate mismatch");
  }
  const double e_sig = energy(sig);
  const double e_ref = energy(ref);
  if (e_sig <= 0.0) throw std::invalid_argument("scale_to_snr: zero-energy signal");
  if (e_ref <= 0.0) throw std::invalid_argument("scale_to_snr: zero-energy reference");
  const double a = std::sqrt(e_ref / (e_sig * std::pow(10.0, snr_db / 10.0)));
  Waveform out = sig;
  for (double& s : out.samples) s *= a;
  return out;
}

Waveform mix(const std::vector<Waveform>& ws) {
  if (ws.empty()) throw std::invalid_argument("mix: no waveforms");
  validate(ws.front());
  Waveform out = ws.front();
  for (std::size_t i = 1; i < ws.size(); ++i) {
    validate(ws[i]);
    if (ws[i].samples.size() != out.samples.size()) {
      throw std::invalid_argument("mix: length mismatch");
    }
    if (ws[i].sample_rate_hz != out.sample_rate_hz) {
      throw std::invalid_argument("mix: sample rate mismatch");
    }
    for (std::size_t t = 0; t < out.samples.size(); ++t) out.samples[t] += ws[i].samples[t];
  }
  return out;
}

}  // namespace chansep::signal
