#include "chansep/train.hpp"

#include <numeric>
#include <stdexcept>

#include "chansep/adam.hpp"
#include "chansep/loss.hpp"
#include "chansep/rng.hpp"

namespace chansep::grad {

Sample stack_samples(const std::vector<Sample>& data, const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw std::invalid_argument("stack_samples: empty selection");
  const std::size_t in_cols = data[idx[0]].first.cols();
  const std::size_t out_cols = data[idx[0]].second.cols();
  std::size_t rows = 0;
  for (std::size_t i : idx) rows += data[i].first.rows();
  Tensor x = Tensor::matrix(rows, in_cols);
  Tensor t = Tensor::matrix(rows, out_cols);
  std::size_t r = 0;
  for (std::size_t i : idx) {
    const Sample& s = data[i];
    if (s.first.cols() != in_cols || s.second.cols() != out_cols ||
        s.first.rows() != s.second.rows()) {
      throw std::invalid_argument("stack_samples: inconsistent sample shapes");
    }
    std::copy(s.first.data.begin(), s.first.data.end(), x.data.begin() + r * in_cols);
    std::copy(s.second.data.begin(), s.second.data.end(), t.data.begin() + r * out_cols);
    r += s.first.rows();
  }
  return {std::move(x), std::move(t)};
}

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
  }
}

}  // namespace

TrainResult train(Network& net, const std::vector<Sample>& data, const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  validate(net);

  const auto full_idx = all_indices(data.size());
  const Sample full = stack_samples(data, full_idx);

  auto dataset_loss = [&]() {
    return mse(forward(net, full.first), full.second);
  };

  TrainResult result;
  result.loss_curve.push_back(dataset_loss());

  auto params = parameters(net);
  AdamState adam = make_adam(params, cfg.lr);

  const std::size_t batch =
      cfg.batch_size <= 0 ? data.size()
                          : std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), data.size());

  std::vector<std::size_t> order = all_indices(data.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (batch < data.size()) {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
      shuffle_indices(order, rng);
    }
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      std::vector<std::size_t> chunk(order.begin() + begin, order.begin() + end);
      const Sample b = batch == data.size() ? full : stack_samples(data, chunk);
      ForwardCache cache;
      const Tensor pred = forward(net, b.first, &cache);
      const Tensor dloss = mse_grad(pred, b.second);
      Gradients g = backward(net, cache, dloss);
      adam_step(params, g.params, adam);
    }
    result.loss_curve.push_back(dataset_loss());
  }
  return result;
}

}  // namespace chansep::grad
