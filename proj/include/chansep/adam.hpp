#pragma once

#include <cstdint>
#include <vector>

#include "chansep/tensor.hpp"

namespace chansep::grad {

// Bias-corrected Adam over a flat list of parameter tensors.
struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t t = 0;
  std::vector<Tensor> m, v;
};

AdamState make_adam(const std::vector<Tensor*>& params, double lr = 0.001);

void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state);

// Convenience overload for gradients held by value.
void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state);

}  // namespace chansep::grad
