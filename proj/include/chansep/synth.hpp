#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "chansep/waveform.hpp"

namespace chansep::signal {

enum class SourceFamily {
  HarmonicComplex,        // stack of decaying partials over a drawn fundamental
  AmBroadband,            // resonator-filtered noise with slow amplitude modulation
  ImpulsiveClicks,        // jittered train of damped ringing clicks
  AmbientNoise,           // one-pole low-passed noise
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Per-class source recipe. Each generated clip draws its family parameters
// from these ranges with the clip's seed, so clips of one class vary but
// stay inside the family. Unused fields are ignored by the other families.
struct ClassSpec {
  SourceFamily family = SourceFamily::AmbientNoise;

  // harmonic-complex
  Range f0_hz{180.0, 260.0};
  Range partials{3.0, 5.0};
  Range partial_decay{0.5, 0.7};

  // amplitude-modulated-broadband
  Range band_center_hz{1400.0, 1800.0};
  Range band_pole{0.96, 0.985};
  Range mod_rate_hz{4.0, 10.0};
  Range mod_depth{0.5, 0.9};

  // impulsive-clicks
  Range click_rate_hz{200.0, 300.0};
  Range ring_hz{2400.0, 3000.0};
  Range ring_decay_ms{1.5, 3.0};
  Range click_jitter{0.0, 0.2};

  // ambient-noise
  Range lowpass_pole{0.975, 0.995};
};

std::string family_name(SourceFamily f);
SourceFamily family_from_name(const std::string& name);

nlohmann::json class_spec_to_json(const ClassSpec& spec);
ClassSpec class_spec_from_json(const nlohmann::json& j);

// Length-n clip, deterministic in (spec, seed), peak-normalized to [-1, 1].
// Throws std::invalid_argument for n == 0.
Waveform synth_source(const ClassSpec& spec, std::uint64_t seed, std::size_t n,
                      std::uint32_t sample_rate_hz = 52734);

}  // namespace chansep::signal
