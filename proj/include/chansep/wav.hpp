#pragma once

#include <string>

#include "chansep/waveform.hpp"

namespace chansep::io {

// Writes mono 16-bit PCM little-endian RIFF/WAVE. Samples are expected in
// [-1, 1]; values outside are clipped with a warning on stderr. Throws on an
// empty waveform or an unwritable path.
void write_wav(const signal::Waveform& w, const std::string& path);

// Reads mono 16-bit PCM WAV written by write_wav (or any compliant file).
// Throws on missing files, non-RIFF/WAVE data, or unsupported encodings
// (only PCM16 mono is accepted).
signal::Waveform read_wav(const std::string& path);

}  // namespace chansep::io
