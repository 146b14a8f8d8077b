#pragma once

#include "chansep/tensor.hpp"
#include "chansep/waveform.hpp"

namespace chansep::algos {

// Fragment rows move between the signal layer (FrameMatrix) and the network
// layer (Tensor) without copying semantics games; both are K x L row-major.

grad::Tensor to_tensor(const signal::FrameMatrix& f);

signal::FrameMatrix to_frames(const grad::Tensor& t, std::size_t original_len);

// frame(w, frame_len) followed by to_tensor.
grad::Tensor frame_tensor(const signal::Waveform& w, std::size_t frame_len);

// to_frames followed by overlap_add, restoring x's length and rate.
signal::Waveform reassemble(const grad::Tensor& t, std::size_t original_len,
                            std::uint32_t sample_rate_hz);

}  // namespace chansep::algos
