#include "chansep/latent_search.hpp"

#include <limits>
#include <stdexcept>

#include "chansep/adam.hpp"
#include "chansep/fragment.hpp"
#include "chansep/loss.hpp"
#include "chansep/rng.hpp"

namespace chansep::algos {

using grad::Tensor;

namespace {

struct RunOutcome {
  std::vector<Tensor> latents;
  std::vector<Tensor> preds;
  double final_loss = 0.0;
};

RunOutcome run_one(const Tensor& frames, const std::vector<grad::Network>& decoders,
                   double lr, int epochs, bool gaussian, double sigma, std::uint64_t seed) {
  const std::size_t channels = decoders.size();
  const std::size_t rows = frames.rows();

  RunOutcome out;
  out.latents.reserve(channels);
  for (const grad::Network& dec : decoders) {
    Tensor h = Tensor::matrix(rows, dec.in_dim());
    if (gaussian) {
      Rng rng(seed);
      for (double& v : h.data) v = sigma * rng.gaussian();
    }
    out.latents.push_back(std::move(h));
  }

  std::vector<Tensor*> params;
  params.reserve(channels);
  for (Tensor& h : out.latents) params.push_back(&h);
  grad::AdamState adam = grad::make_adam(params, lr);

  std::vector<Tensor> grads(channels);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Tensor sum = Tensor::matrix(rows, frames.cols());
    std::vector<grad::ForwardCache> caches(channels);
    for (std::size_t c = 0; c < channels; ++c) {
      const Tensor pred = grad::forward(decoders[c], out.latents[c], &caches[c]);
      for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += pred.data[i];
    }
    const Tensor dsum = grad::mse_grad(sum, frames);
    for (std::size_t c = 0; c < channels; ++c) {
      // only the input gradient is used; decoder parameters stay frozen
      grads[c] = grad::backward(decoders[c], caches[c], dsum).input;
    }
    grad::adam_step(params, grads, adam);
  }

  Tensor sum = Tensor::matrix(rows, frames.cols());
  out.preds.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    out.preds.push_back(grad::forward(decoders[c], out.latents[c]));
    for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += out.preds[c].data[i];
  }
  out.final_loss = grad::mse(sum, frames);
  return out;
}

}  // namespace

LatentSearchResult latent_search(const signal::Waveform& x,
                                 const std::vector<grad::Network>& decoders,
                                 const LatentSearchConfig& cfg) {
  if (decoders.empty()) throw std::invalid_argument("latent_search: empty decoder list");
  if (cfg.lr_candidates.empty()) throw std::invalid_argument("latent_search: no lr candidates");
  if (cfg.epochs < 1) throw std::invalid_argument("latent_search: epochs must be >= 1");
  if (!cfg.zeros_init && cfg.gaussian_restarts < 1) {
    throw std::invalid_argument("latent_search: configuration yields no runs");
  }
  for (double lr : cfg.lr_candidates) {
    if (!(lr > 0.0)) throw std::invalid_argument("latent_search: lr candidates must be positive");
  }
  const std::size_t frame_len = decoders[0].out_dim();
  for (const grad::Network& dec : decoders) {
    if (dec.out_dim() != frame_len) {
      throw std::invalid_argument("latent_search: decoder output widths differ");
    }
  }

  const Tensor frames = frame_tensor(x, frame_len);

  LatentSearchResult result;
  result.best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < cfg.lr_candidates.size(); ++li) {
    const double lr = cfg.lr_candidates[li];
    const int first = cfg.zeros_init ? 0 : 1;
    for (int restart = first; restart <= cfg.gaussian_restarts; ++restart) {
      const std::uint64_t run_seed =
          derive_seed(cfg.seed, li * 1000 + static_cast<std::uint64_t>(restart));
      RunOutcome run = run_one(frames, decoders, lr, cfg.epochs, restart > 0,
                               cfg.gaussian_sigma, run_seed);
      result.runs.push_back({lr, restart, run.final_loss});
      if (run.final_loss < result.best_loss) {
        result.best_loss = run.final_loss;
        result.best_lr = lr;
        result.best_restart = restart;
        result.latents = std::move(run.latents);
        result.outputs.clear();
        for (const Tensor& pred : run.preds) {
          result.outputs.push_back(reassemble(pred, x.samples.size(), x.sample_rate_hz));
        }
      }
    }
  }
  return result;
}

}  // namespace chansep::algos
