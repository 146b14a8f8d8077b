#include "chansep/network.hpp"

#include <cmath>
#include <stdexcept>

#include "chansep/kernels.hpp"
#include "chansep/rng.hpp"

namespace chansep::grad {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  throw std::invalid_argument("unknown activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "linear") return Activation::Linear;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation: " + name);
}

std::size_t Network::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.W.numel() + l.b.numel();
  return n;
}

Network make_network(const std::vector<std::size_t>& widths,
                     const std::vector<Activation>& acts, std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("network needs at least one layer");
  if (acts.size() != widths.size() - 1) {
    throw std::invalid_argument("one activation per layer required");
  }
  Network net;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    const std::size_t fan_in = widths[l];
    const std::size_t fan_out = widths[l + 1];
    layer.W = Tensor::matrix(fan_out, fan_in);
    layer.b = Tensor::vector(fan_out);
    layer.act = acts[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Rng rng(derive_seed(seed, l));
    for (double& v : layer.W.data) v = rng.uniform(-bound, bound);
    net.layers.push_back(std::move(layer));
  }
  validate(net);
  return net;
}

void validate(const Network& net) {
  if (net.layers.empty()) throw std::invalid_argument("network has no layers");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    if (layer.W.shape.size() != 2 || layer.b.shape.size() != 1 ||
        layer.b.shape[0] != layer.out_dim()) {
      throw std::invalid_argument("layer parameter shapes are inconsistent");
    }
    if (l > 0 && net.layers[l - 1].out_dim() != layer.in_dim()) {
      throw std::invalid_argument("adjacent layer dims do not chain");
    }
  }
  if (net.param_count() == 0) throw std::invalid_argument("network has no parameters");
}

std::vector<Tensor*> parameters(Network& net) {
  std::vector<Tensor*> ps;
  for (Layer& l : net.layers) {
    ps.push_back(&l.W);
    ps.push_back(&l.b);
  }
  return ps;
}

std::vector<const Tensor*> parameters(const Network& net) {
  std::vector<const Tensor*> ps;
  for (const Layer& l : net.layers) {
    ps.push_back(&l.W);
    ps.push_back(&l.b);
  }
  return ps;
}

std::vector<double> parameter_snapshot(const Network& net) {
  std::vector<double> flat;
  flat.reserve(net.param_count());
  for (const Layer& l : net.layers) {
    flat.insert(flat.end(), l.W.data.begin(), l.W.data.end());
    flat.insert(flat.end(), l.b.data.begin(), l.b.data.end());
  }
  return flat;
}

namespace {

void apply_activation(Activation act, const Tensor& pre, Tensor& post) {
  post = pre;
  switch (act) {
    case Activation::Linear:
      break;
    case Activation::Tanh:
      for (double& v : post.data) v = std::tanh(v);
      break;
    case Activation::Relu:
      for (double& v : post.data) v = v > 0.0 ? v : 0.0;
      break;
  }
}

// d(post)/d(pre) elementwise, folded into grad in place.
void activation_backward(Activation act, const Tensor& pre, const Tensor& post, Tensor& grad) {
  switch (act) {
    case Activation::Linear:
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < grad.data.size(); ++i) {
        grad.data[i] *= 1.0 - post.data[i] * post.data[i];
      }
      break;
    case Activation::Relu:
      for (std::size_t i = 0; i < grad.data.size(); ++i) {
        if (pre.data[i] <= 0.0) grad.data[i] = 0.0;
      }
      break;
  }
}

}  // namespace

Tensor forward(const Network& net, const Tensor& x, ForwardCache* cache) {
  validate(net);
  if (x.shape.size() != 2 || x.cols() != net.in_dim()) {
    throw std::invalid_argument("forward: input columns must match first layer input dim");
  }
  if (cache) {
    cache->input = x;
    cache->pre.clear();
    cache->post.clear();
  }
  Tensor cur = x;
  for (const Layer& layer : net.layers) {
    Tensor pre = Tensor::matrix(cur.rows(), layer.out_dim());
    kernels::affine_forward(cur.data.data(), layer.W.data.data(), layer.b.data.data(),
                            pre.data.data(), cur.rows(), layer.in_dim(), layer.out_dim());
    Tensor post;
    apply_activation(layer.act, pre, post);
    if (cache) {
      cache->pre.push_back(pre);
      cache->post.push_back(post);
    }
    cur = std::move(post);
  }
  return cur;
}

Gradients backward(const Network& net, const ForwardCache& cache, const Tensor& dloss_dout) {
  validate(net);
  const std::size_t n_layers = net.layers.size();
  if (cache.pre.size() != n_layers || cache.post.size() != n_layers) {
    throw std::invalid_argument("backward: cache does not match network depth");
  }
  if (!same_shape(dloss_dout, cache.post.back())) {
    throw std::invalid_argument("backward: loss gradient shape mismatch");
  }
  const std::size_t k = cache.input.rows();
  Gradients g;
  g.params.resize(2 * n_layers);

  Tensor delta = dloss_dout;
  for (std::size_t li = n_layers; li-- > 0;) {
    const Layer& layer = net.layers[li];
    if (cache.pre[li].rows() != k || cache.pre[li].cols() != layer.out_dim()) {
      throw std::invalid_argument("backward: stale cache");
    }
    activation_backward(layer.act, cache.pre[li], cache.post[li], delta);
    const Tensor& layer_in = li == 0 ? cache.input : cache.post[li - 1];
    Tensor dW = Tensor::matrix(layer.out_dim(), layer.in_dim());
    Tensor db = Tensor::vector(layer.out_dim());
    kernels::grad_weights(delta.data.data(), layer_in.data.data(), dW.data.data(), k,
                          layer.in_dim(), layer.out_dim());
    kernels::grad_bias(delta.data.data(), db.data.data(), k, layer.out_dim());
    Tensor dx = Tensor::matrix(k, layer.in_dim());
    kernels::grad_input(delta.data.data(), layer.W.data.data(), dx.data.data(), k,
                        layer.in_dim(), layer.out_dim());
    g.params[2 * li] = std::move(dW);
    g.params[2 * li + 1] = std::move(db);
    delta = std::move(dx);
  }
  g.input = std::move(delta);
  return g;
}

}  // namespace chansep::grad
