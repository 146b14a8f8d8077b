#pragma once

#include <cstdint>
#include <vector>

namespace chansep::signal {

// Mono real-valued signal. Plain aggregate; operations validate the
// invariants (finite samples, length >= 1) at their boundaries.
struct Waveform {
  std::uint32_t sample_rate_hz = 52734;
  std::vector<double> samples;
};

// Rows of 50%-overlapping fragments. Row k covers sample offsets
// [k*hop, k*hop + frame_len); positions past original_len are zero padding.
struct FrameMatrix {
  std::size_t frame_len = 0;     // L, even
  std::size_t hop = 0;           // L/2
  std::size_t num_frames = 0;    // K = ceil(max(T-L,0)/H) + 1
  std::size_t original_len = 0;  // T
  std::vector<double> frames;    // K x L row-major

  double& at(std::size_t k, std::size_t j) { return frames[k * frame_len + j]; }
  double at(std::size_t k, std::size_t j) const { return frames[k * frame_len + j]; }
};

// K for a signal of length T framed with length L and hop L/2.
std::size_t frame_count(std::size_t total_len, std::size_t frame_len);

// Splits w into 50%-overlapping frames, zero-padding only at the tail.
// Throws std::invalid_argument on odd frame_len or an empty waveform.
FrameMatrix frame(const Waveform& w, std::size_t frame_len);

// Inverse of frame: each output sample is the sum of its frame
// contributions divided by the contribution count (2 in the interior,
// 1 at the edges), truncated to original_len. Exact for any frames.
Waveform overlap_add(const FrameMatrix& f, std::uint32_t sample_rate_hz = 52734);

// Sum of squared samples.
double energy(const Waveform& w);
double energy(const std::vector<double>& samples);

double rms(const Waveform& w);

// Returns a*sig with a chosen so that 10*log10(energy(ref)/energy(a*sig))
// equals snr_db exactly. Throws on zero-energy input or length/rate mismatch.
Waveform scale_to_snr(const Waveform& sig, const Waveform& ref, double snr_db);

// Sample-wise sum of equal-length, equal-rate waveforms.
Waveform mix(const std::vector<Waveform>& ws);

void validate(const Waveform& w);

}  // namespace chansep::signal
