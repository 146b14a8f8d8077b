#include "chansep/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "chansep/rng.hpp"

namespace chansep::signal {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double draw(Rng& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

void harmonic_complex(const ClassSpec& spec, Rng& rng, double sr, std::vector<double>& x) {
  const double f0 = draw(rng, spec.f0_hz);
  const int lo = static_cast<int>(spec.partials.lo);
  const int hi = static_cast<int>(spec.partials.hi);
  const int n_partials = lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
  const double decay = draw(rng, spec.partial_decay);
  std::vector<double> phase(n_partials), amp(n_partials);
  for (int p = 0; p < n_partials; ++p) {
    phase[p] = rng.uniform(0.0, kTwoPi);
    amp[p] = std::pow(decay, p);
  }
  for (std::size_t t = 0; t < x.size(); ++t) {
    double v = 0.0;
    for (int p = 0; p < n_partials; ++p) {
      v += amp[p] * std::sin(kTwoPi * f0 * (p + 1) * static_cast<double>(t) / sr + phase[p]);
    }
    x[t] = v;
  }
}

void am_broadband(const ClassSpec& spec, Rng& rng, double sr, std::vector<double>& x) {
  const double fc = draw(rng, spec.band_center_hz);
  const double r = draw(rng, spec.band_pole);
  const double fm = draw(rng, spec.mod_rate_hz);
  const double depth = draw(rng, spec.mod_depth);
  const double mod_phase = rng.uniform(0.0, kTwoPi);
  const double theta = kTwoPi * fc / sr;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  // two-pole resonator driven by white noise; warm up past the transient
  const std::size_t warm = 512;
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t t = 0; t < warm + x.size(); ++t) {
    const double y = a1 * y1 + a2 * y2 + rng.gaussian();
    y2 = y1;
    y1 = y;
    if (t >= warm) {
      const std::size_t i = t - warm;
      const double env = (1.0 + depth * std::sin(kTwoPi * fm * static_cast<double>(i) / sr + mod_phase)) / (1.0 + depth);
      x[i] = env * y;
    }
  }
}

void impulsive_clicks(const ClassSpec& spec, Rng& rng, double sr, std::vector<double>& x) {
  const double rate = draw(rng, spec.click_rate_hz);
  const double ring = draw(rng, spec.ring_hz);
  const double decay_ms = draw(rng, spec.ring_decay_ms);
  const double jitter = draw(rng, spec.click_jitter);
  const double period = sr / rate;
  const double tau = decay_ms * 1e-3 * sr;  // samples
  const std::size_t n = x.size();
  // click onsets: jittered periodic train, first onset inside one period
  double onset = rng.uniform(0.0, period);
  while (onset < static_cast<double>(n)) {
    const double amp = rng.uniform(0.5, 1.0);
    const double phase = rng.uniform(0.0, kTwoPi);
    const std::size_t start = static_cast<std::size_t>(onset);
    const std::size_t stop = std::min(n, start + static_cast<std::size_t>(8.0 * tau) + 1);
    for (std::size_t t = start; t < stop; ++t) {
      const double dt = static_cast<double>(t) - onset;
      x[t] += amp * std::exp(-dt / tau) * std::sin(kTwoPi * ring * dt / sr + phase);
    }
    onset += period * (1.0 + rng.uniform(-jitter, jitter));
  }
}

void ambient_noise(const ClassSpec& spec, Rng& rng, std::vector<double>& x) {
  const double a = draw(rng, spec.lowpass_pole);
  const std::size_t warm = 512;
  double y = 0.0;
  for (std::size_t t = 0; t < warm + x.size(); ++t) {
    y = a * y + (1.0 - a) * rng.gaussian();
    if (t >= warm) x[t - warm] = y;
  }
}

nlohmann::json range_to_json(const Range& r) { return nlohmann::json::array({r.lo, r.hi}); }

Range range_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("range must be [lo, hi]");
  Range r{j[0].get<double>(), j[1].get<double>()};
  if (!(r.lo <= r.hi)) throw std::invalid_argument("range lo must be <= hi");
  return r;
}

}  // namespace

std::string family_name(SourceFamily f) {
  switch (f) {
    case SourceFamily::HarmonicComplex: return "harmonic-complex";
    case SourceFamily::AmBroadband: return "amplitude-modulated-broadband";
    case SourceFamily::ImpulsiveClicks: return "impulsive-clicks";
    case SourceFamily::AmbientNoise: return "ambient-noise";
  }
  throw std::invalid_argument("unknown source family");
}

SourceFamily family_from_name(const std::string& name) {
  if (name == "harmonic-complex") return SourceFamily::HarmonicComplex;
  if (name == "amplitude-modulated-broadband") return SourceFamily::AmBroadband;
  if (name == "impulsive-clicks") return SourceFamily::ImpulsiveClicks;
  if (name == "ambient-noise") return SourceFamily::AmbientNoise;
  throw std::invalid_argument("unknown source family: " + name);
}

nlohmann::json class_spec_to_json(const ClassSpec& s) {
  nlohmann::json j;
  j["family"] = family_name(s.family);
  switch (s.family) {
    case SourceFamily::HarmonicComplex:
      j["f0_hz"] = range_to_json(s.f0_hz);
      j["partials"] = range_to_json(s.partials);
      j["partial_decay"] = range_to_json(s.partial_decay);
      break;
    case SourceFamily::AmBroadband:
      j["band_center_hz"] = range_to_json(s.band_center_hz);
      j["band_pole"] = range_to_json(s.band_pole);
      j["mod_rate_hz"] = range_to_json(s.mod_rate_hz);
      j["mod_depth"] = range_to_json(s.mod_depth);
      break;
    case SourceFamily::ImpulsiveClicks:
      j["click_rate_hz"] = range_to_json(s.click_rate_hz);
      j["ring_hz"] = range_to_json(s.ring_hz);
      j["ring_decay_ms"] = range_to_json(s.ring_decay_ms);
      j["click_jitter"] = range_to_json(s.click_jitter);
      break;
    case SourceFamily::AmbientNoise:
      j["lowpass_pole"] = range_to_json(s.lowpass_pole);
      break;
  }
  return j;
}

ClassSpec class_spec_from_json(const nlohmann::json& j) {
  ClassSpec s;
  s.family = family_from_name(j.at("family").get<std::string>());
  auto opt = [&j](const char* key, Range& out) {
    if (j.contains(key)) out = range_from_json(j.at(key));
  };
  opt("f0_hz", s.f0_hz);
  opt("partials", s.partials);
  opt("partial_decay", s.partial_decay);
  opt("band_center_hz", s.band_center_hz);
  opt("band_pole", s.band_pole);
  opt("mod_rate_hz", s.mod_rate_hz);
  opt("mod_depth", s.mod_depth);
  opt("click_rate_hz", s.click_rate_hz);
  opt("ring_hz", s.ring_hz);
  opt("ring_decay_ms", s.ring_decay_ms);
  opt("click_jitter", s.click_jitter);
  opt("lowpass_pole", s.lowpass_pole);
  return s;
}

Waveform synth_source(const ClassSpec& spec, std::uint64_t seed, std::size_t n,
                      std::uint32_t sample_rate_hz) {
  if (n == 0) throw std::invalid_argument("synth_source: n must be positive");
  Rng rng(seed);
  std::vector<double> x(n, 0.0);
  const double sr = static_cast<double>(sample_rate_hz);
  switch (spec.family) {
    case SourceFamily::HarmonicComplex: harmonic_complex(spec, rng, sr, x); break;
    case SourceFamily::AmBroadband: am_broadband(spec, rng, sr, x); break;
    case SourceFamily::ImpulsiveClicks: impulsive_clicks(spec, rng, sr, x); break;
    case SourceFamily::AmbientNoise: ambient_noise(spec, rng, x); break;
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::fabs(v));
  if (peak < 1e-30) throw std::runtime_error("synth_source: degenerate all-zero clip");
  for (double& v : x) v /= peak;
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples = std::move(x);
  return w;
}

}  // namespace chansep::signal
