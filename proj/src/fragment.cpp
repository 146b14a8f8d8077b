#include "chansep/fragment.hpp"

#include <stdexcept>

namespace chansep::algos {

grad::Tensor to_tensor(const signal::FrameMatrix& f) {
  grad::Tensor t = grad::Tensor::matrix(f.num_frames, f.frame_len);
  t.data = f.frames;
  return t;
}

signal::FrameMatrix to_frames(const grad::Tensor& t, std::size_t original_len) {
  if (t.shape.size() != 2) throw std::invalid_argument("to_frames: rank-2 tensor required");
  signal::FrameMatrix f;
  f.frame_len = t.cols();
  f.hop = f.frame_len / 2;
  f.num_frames = t.rows();
  f.original_len = original_len;
  f.frames = t.data;
  return f;
}

grad::Tensor frame_tensor(const signal::Waveform& w, std::size_t frame_len) {
  return to_tensor(signal::frame(w, frame_len));
}

signal::Waveform reassemble(const grad::Tensor& t, std::size_t original_len,
                            std::uint32_t sample_rate_hz) {
  return signal::overlap_add(to_frames(t, original_len), sample_rate_hz);
}

}  // namespace chansep::algos
