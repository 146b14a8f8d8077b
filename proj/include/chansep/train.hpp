#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "chansep/network.hpp"

namespace chansep::grad {

struct TrainConfig {
  int epochs = 100;
  double lr = 0.001;
  int batch_size = 0;  // <= 0 means full batch
  std::uint64_t seed = 0;
};

struct TrainResult {
  // loss_curve[0] is the dataset loss of the network before any update;
  // loss_curve[e] is the loss after epoch e.
  std::vector<double> loss_curve;
};

using Sample = std::pair<Tensor, Tensor>;  // (input rows, target rows)

// Trains net in place with Adam on mse over (x, target) pairs. Mini-batches
// shuffle sample order with a per-epoch seed derived from cfg.seed; the
// whole run is a pure function of (net, data, cfg).
TrainResult train(Network& net, const std::vector<Sample>& data, const TrainConfig& cfg);

// Rows of all samples stacked into one matrix pair (samples must agree in
// column counts). Used for full-batch steps and loss evaluation.
Sample stack_samples(const std::vector<Sample>& data, const std::vector<std::size_t>& idx);

}  // namespace chansep::grad
