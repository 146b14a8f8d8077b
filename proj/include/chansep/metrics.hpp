#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chansep/waveform.hpp"

namespace chansep::metrics {

// All dB-valued metrics are clamped to this magnitude so perfect or
// orthogonal estimates stay finite under aggregation.
inline constexpr double kClampDb = 60.0;

// Scale-invariant SNR: 10*log10(rho^2 / (1 - rho^2)) with rho the cosine
// similarity between est and ref. rho^2 is computed as dot^2/(e_est*e_ref)
// without a square root, so e.g. si_snr([1,0],[1,1]) is exactly 0 dB.
// A zero-energy est returns -60 dB; a zero-energy ref throws.
double si_snr(const std::vector<double>& est, const std::vector<double>& ref);
double si_snr(const signal::Waveform& est, const signal::Waveform& ref);

// Scale-DEPENDENT signal-to-reconstruction-error ratio:
// 10*log10(energy(ref)/energy(ref - est)), clamped to +-60 dB. This is not
// BSS-Eval SDR; see README. sdr(2*ref, ref) = 0 dB while si_snr(2*ref, ref)
// clamps to +60 dB.
double sdr(const std::vector<double>& est, const std::vector<double>& ref);
double sdr(const signal::Waveform& est, const signal::Waveform& ref);

// Mean squared error of one channel: sum of squared differences over length.
double mse(const std::vector<double>& est, const std::vector<double>& ref);

// Active-channel MSE: per-channel MSEs of predictions against targets,
// averaged over the channels marked active. Throws when no channel is active.
double mse_s(const std::vector<std::vector<double>>& targets,
             const std::vector<std::vector<double>>& preds,
             const std::vector<bool>& active_mask);

// Mute-channel MSE: per-channel MSEs of predictions against zero, averaged
// over the channels marked mute. Throws when every channel is active — the
// caller is expected to skip all-active records.
double mse_z(const std::vector<std::vector<double>>& preds,
             const std::vector<bool>& mute_mask);

// Leakage of a mute channel: si_snr of its output against every active
// reference. Throws on an empty reference list.
std::vector<std::pair<std::string, double>> si_snr_z(
    const signal::Waveform& mute_pred,
    const std::vector<std::pair<std::string, signal::Waveform>>& active_refs);

}  // namespace chansep::metrics
