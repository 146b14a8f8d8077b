#include "chansep/loss.hpp"

#include <stdexcept>

#include "chansep/kernels.hpp"

namespace chansep::grad {

double mse(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse");
  const std::size_t rows = pred.shape.size() >= 2 ? pred.rows() : 1;
  const std::size_t cols = pred.numel() / rows;
  const double ssd = kernels::sum_sq_diff(pred.data.data(), target.data.data(), rows, cols);
  return ssd / static_cast<double>(pred.numel());
}

Tensor mse_grad(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse_grad");
  Tensor g = pred;
  const double scale = 2.0 / static_cast<double>(pred.numel());
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    g.data[i] = scale * (pred.data[i] - target.data[i]);
  }
  return g;
}

double channel_mse(const std::vector<Tensor>& preds, const std::vector<Tensor>& targets) {
  if (preds.empty()) throw std::invalid_argument("channel_mse: no channels");
  if (preds.size() != targets.size()) {
    throw std::invalid_argument("channel_mse: channel count mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) total += mse(preds[i], targets[i]);
  return total / static_cast<double>(preds.size());
}

}  // namespace chansep::grad
