#include "chansep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chansep::metrics {

namespace {

void require_equal_lengths(const std::vector<double>& est, const std::vector<double>& ref) {
  if (est.size() != ref.size()) throw std::invalid_argument("estimate/reference length mismatch");
  if (ref.empty()) throw std::invalid_argument("empty signals");
}

double clamp_db(double v) { return std::clamp(v, -kClampDb, kClampDb); }

}  // namespace

double si_snr(const std::vector<double>& est, const std::vector<double>& ref) {
  require_equal_lengths(est, ref);
  double dot = 0.0, e_est = 0.0, e_ref = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    dot += est[i] * ref[i];
    e_est += est[i] * est[i];
    e_ref += ref[i] * ref[i];
  }
  if (!(e_ref > 0.0)) throw std::invalid_argument("si_snr: reference has zero energy");
  if (!(e_est > 0.0)) return -kClampDb;
  const double rho2 = dot * dot / (e_est * e_ref);
  const double denom = 1.0 - rho2;
  if (!(denom > 0.0)) return kClampDb;
  return clamp_db(10.0 * std::log10(rho2 / denom));
}

double si_snr(const signal::Waveform& est, const signal::Waveform& ref) {
  return si_snr(est.samples, ref.samples);
}

double sdr(const std::vector<double>& est, const std::vector<double>& ref) {
  require_equal_lengths(est, ref);
  double e_ref = 0.0, e_res = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    e_ref += ref[i] * ref[i];
    const double d = ref[i] - est[i];
    e_res += d * d;
  }
  if (!(e_ref > 0.0)) throw std::invalid_argument("sdr: reference has zero energy");
  if (!(e_res > 0.0)) return kClampDb;
  return clamp_db(10.0 * std::log10(e_ref / e_res));
}

double sdr(const signal::Waveform& est, const signal::Waveform& ref) {
  return sdr(est.samples, ref.samples);
}

double mse(const std::vector<double>& est, const std::vector<double>& ref) {
  require_equal_lengths(est, ref);
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - ref[i];
    acc += d * d;
  }
  return acc / static_cast<double>(est.size());
}

double mse_s(const std::vector<std::vector<double>>& targets,
             const std::vector<std::vector<double>>& preds,
             const std::vector<bool>& active_mask) {
  if (targets.size() != preds.size() || targets.size() != active_mask.size()) {
    throw std::invalid_argument("mse_s: channel count mismatch");
  }
  double acc = 0.0;
  std::size_t n_s = 0;
  for (std::size_t c = 0; c < active_mask.size(); ++c) {
    if (!active_mask[c]) continue;
    acc += mse(preds[c], targets[c]);
    ++n_s;
  }
  if (n_s == 0) throw std::invalid_argument("mse_s: no active channels");
  return acc / static_cast<double>(n_s);
}

double mse_z(const std::vector<std::vector<double>>& preds,
             const std::vector<bool>& mute_mask) {
  if (preds.size() != mute_mask.size()) {
    throw std::invalid_argument("mse_z: channel count mismatch");
  }
  double acc = 0.0;
  std::size_t n_z = 0;
  for (std::size_t c = 0; c < mute_mask.size(); ++c) {
    if (!mute_mask[c]) continue;
    if (preds[c].empty()) throw std::invalid_argument("mse_z: empty channel output");
    double e = 0.0;
    for (double v : preds[c]) e += v * v;
    acc += e / static_cast<double>(preds[c].size());
    ++n_z;
  }
  if (n_z == 0) throw std::invalid_argument("mse_z: no mute channels");
  return acc / static_cast<double>(n_z);
}

std::vector<std::pair<std::string, double>> si_snr_z(
    const signal::Waveform& mute_pred,
    const std::vector<std::pair<std::string, signal::Waveform>>& active_refs) {
  if (active_refs.empty()) throw std::invalid_argument("si_snr_z: no active references");
  std::vector<std::pair<std::string, double>> out;
  out.reserve(active_refs.size());
  for (const auto& [cls, ref] : active_refs) {
    out.emplace_back(cls, si_snr(mute_pred, ref));
  }
  return out;
}

}  // namespace chansep::metrics
