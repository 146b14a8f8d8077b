#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chansep/tensor.hpp"

namespace chansep::grad {

enum class Activation { Linear, Tanh, Relu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// One dense layer: y = act(x W^T + b), applied independently per row.
struct Layer {
  Tensor W;  // out x in
  Tensor b;  // out
  Activation act = Activation::Linear;

  std::size_t in_dim() const { return W.cols(); }
  std::size_t out_dim() const { return W.rows(); }
};

struct Network {
  std::vector<Layer> layers;

  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.back().out_dim(); }
  std::size_t param_count() const;
};

// Chains widths[0] -> widths[1] -> ... with the given activation per layer.
// Weights are uniform in +/- sqrt(6 / (fan_in + fan_out)) from the seed.
Network make_network(const std::vector<std::size_t>& widths,
                     const std::vector<Activation>& acts, std::uint64_t seed);

// Checks adjacent layer dims chain and parameter count > 0.
void validate(const Network& net);

// Pointers to every parameter tensor, W then b per layer. Matches the
// ordering used by backward() gradients and adam state.
std::vector<Tensor*> parameters(Network& net);
std::vector<const Tensor*> parameters(const Network& net);

// Flat copy of all parameters, for determinism / freeze checks.
std::vector<double> parameter_snapshot(const Network& net);

struct ForwardCache {
  Tensor input;
  std::vector<Tensor> pre;   // pre-activation per layer
  std::vector<Tensor> post;  // activation output per layer
};

// Row-wise forward. Cache is optional and required only for backward().
Tensor forward(const Network& net, const Tensor& x, ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Tensor> params;  // same ordering as parameters()
  Tensor input;
};

// Exact reverse-mode gradients of a scalar loss, given dLoss/dOutput.
// Throws if the cache does not match the network.
Gradients backward(const Network& net, const ForwardCache& cache, const Tensor& dloss_dout);

}  // namespace chansep::grad
