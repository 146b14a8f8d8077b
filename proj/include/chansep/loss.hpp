#pragma once

#include <vector>

#include "chansep/tensor.hpp"

namespace chansep::grad {

// Mean over all elements of the squared difference.
double mse(const Tensor& pred, const Tensor& target);

// d(mse)/d(pred) = 2 (pred - target) / numel.
Tensor mse_grad(const Tensor& pred, const Tensor& target);

// (1/C) * sum_i mse(pred_i, target_i).
double channel_mse(const std::vector<Tensor>& preds, const std::vector<Tensor>& targets);

}  // namespace chansep::grad
