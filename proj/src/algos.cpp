#include "chansep/algos.hpp"

#include <numeric>
#include <stdexcept>

#include "chansep/adam.hpp"
#include "chansep/fragment.hpp"
#include "chansep/loss.hpp"
#include "chansep/rng.hpp"

namespace chansep::algos {

using grad::Activation;
using grad::Network;
using grad::Tensor;

grad::Network make_encoder(const ArchConfig& arch, std::uint64_t seed) {
  if (arch.enc_hidden > 0) {
    return grad::make_network({arch.frame_len, arch.enc_hidden, arch.latent},
                              {Activation::Tanh, Activation::Linear}, seed);
  }
  return grad::make_network({arch.frame_len, arch.latent}, {Activation::Linear}, seed);
}

grad::Network make_decoder(const ArchConfig& arch, std::uint64_t seed) {
  if (arch.dec_hidden > 0) {
    return grad::make_network({arch.latent, arch.dec_hidden, arch.frame_len},
                              {Activation::Tanh, Activation::Linear}, seed);
  }
  return grad::make_network({arch.latent, arch.frame_len}, {Activation::Linear}, seed);
}

namespace {

Network make_trunk(const ArchConfig& arch, std::uint64_t seed) {
  return grad::make_network({arch.frame_len, arch.trunk_width}, {Activation::Tanh}, seed);
}

Network make_head(const ArchConfig& arch, std::uint64_t seed) {
  return grad::make_network({arch.trunk_width, arch.latent}, {Activation::Linear}, seed);
}

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

void validate_channel_dataset(const ChannelDataset& data, std::size_t channels,
                              std::size_t frame_len) {
  if (data.empty()) throw std::invalid_argument("channel dataset is empty");
  for (const ChannelRecord& r : data) {
    if (r.targets.size() != channels) {
      throw std::invalid_argument("record channel count is inconsistent");
    }
    if (r.mixture.cols() != frame_len) {
      throw std::invalid_argument("record fragment length does not match the architecture");
    }
    for (const Tensor& t : r.targets) {
      if (!grad::same_shape(t, r.mixture)) {
        throw std::invalid_argument("target fragments must match mixture fragments in shape");
      }
    }
  }
}

// Stacks the selected records into one mixture matrix and per-channel
// target matrices.
struct StackedBatch {
  Tensor mixture;
  std::vector<Tensor> targets;
};

StackedBatch stack_batch(const ChannelDataset& data, const std::vector<std::size_t>& idx,
                         std::size_t channels) {
  const std::size_t cols = data[idx[0]].mixture.cols();
  std::size_t rows = 0;
  for (std::size_t i : idx) rows += data[i].mixture.rows();
  StackedBatch b;
  b.mixture = Tensor::matrix(rows, cols);
  b.targets.assign(channels, Tensor::matrix(rows, cols));
  std::size_t r = 0;
  for (std::size_t i : idx) {
    const ChannelRecord& rec = data[i];
    std::copy(rec.mixture.data.begin(), rec.mixture.data.end(),
              b.mixture.data.begin() + r * cols);
    for (std::size_t c = 0; c < channels; ++c) {
      std::copy(rec.targets[c].data.begin(), rec.targets[c].data.end(),
                b.targets[c].data.begin() + r * cols);
    }
    r += rec.mixture.rows();
  }
  return b;
}

void add_into(Tensor& acc, const Tensor& inc) {
  for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += inc.data[i];
}

void scale_tensor(Tensor& t, double s) {
  for (double& v : t.data) v *= s;
}

}  // namespace

Autoencoder train_autoencoder(const std::vector<signal::Waveform>& class_samples,
                              const ArchConfig& arch, const grad::TrainConfig& cfg,
                              const std::string& class_id, std::vector<double>* loss_curve) {
  if (class_samples.empty()) throw std::invalid_argument("train_autoencoder: empty class set");

  std::vector<grad::Sample> data;
  data.reserve(class_samples.size());
  for (const signal::Waveform& w : class_samples) {
    Tensor frames = frame_tensor(w, arch.frame_len);
    data.emplace_back(frames, frames);
  }

  // Encoder and decoder train jointly as one chained network and are split
  // back afterwards.
  Network enc = make_encoder(arch, derive_seed(cfg.seed, 1));
  Network dec = make_decoder(arch, derive_seed(cfg.seed, 2));
  const std::size_t enc_depth = enc.layers.size();
  Network chain;
  chain.layers = enc.layers;
  chain.layers.insert(chain.layers.end(), dec.layers.begin(), dec.layers.end());

  grad::TrainResult tr = grad::train(chain, data, cfg);
  if (loss_curve) *loss_curve = tr.loss_curve;

  Autoencoder ae;
  ae.class_id = class_id;
  ae.encoder.layers.assign(chain.layers.begin(), chain.layers.begin() + enc_depth);
  ae.decoder.layers.assign(chain.layers.begin() + enc_depth, chain.layers.end());
  return ae;
}

Alg1Model train_alg1(const ChannelDataset& data, const std::vector<std::string>& classes,
                     const ArchConfig& arch, const grad::TrainConfig& cfg,
                     std::vector<double>* loss_curve) {
  const std::size_t channels = classes.size();
  if (channels == 0) throw std::invalid_argument("train_alg1: no channels");
  validate_channel_dataset(data, channels, arch.frame_len);

  Alg1Model model;
  model.channel_classes = classes;
  model.frame_len = arch.frame_len;
  model.encoder = make_encoder(arch, derive_seed(cfg.seed, 1));
  for (std::size_t c = 0; c < channels; ++c) {
    model.decoders.push_back(make_decoder(arch, derive_seed(cfg.seed, 100 + c)));
  }

  std::vector<Tensor*> params = grad::parameters(model.encoder);
  for (Network& dec : model.decoders) {
    for (Tensor* p : grad::parameters(dec)) params.push_back(p);
  }
  grad::AdamState adam = grad::make_adam(params, cfg.lr);

  const StackedBatch full = stack_batch(data, all_indices(data.size()), channels);
  auto dataset_loss = [&]() {
    const Tensor h = grad::forward(model.encoder, full.mixture);
    std::vector<Tensor> preds;
    preds.reserve(channels);
    for (const Network& dec : model.decoders) preds.push_back(grad::forward(dec, h));
    return grad::channel_mse(preds, full.targets);
  };

  std::vector<double> curve;
  curve.push_back(dataset_loss());

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
      const StackedBatch b = batch == data.size() ? full : stack_batch(data, chunk, channels);

      grad::ForwardCache enc_cache;
      const Tensor h = grad::forward(model.encoder, b.mixture, &enc_cache);

      std::vector<Tensor> grads(params.size());
      Tensor dh = Tensor::matrix(h.rows(), h.cols());
      std::size_t gi = 2 * model.encoder.layers.size();
      for (std::size_t c = 0; c < channels; ++c) {
        grad::ForwardCache dec_cache;
        const Tensor pred = grad::forward(model.decoders[c], h, &dec_cache);
        Tensor dpred = grad::mse_grad(pred, b.targets[c]);
        scale_tensor(dpred, 1.0 / static_cast<double>(channels));
        grad::Gradients g = grad::backward(model.decoders[c], dec_cache, dpred);
        for (Tensor& pg : g.params) grads[gi++] = std::move(pg);
        add_into(dh, g.input);
      }
      grad::Gradients ge = grad::backward(model.encoder, enc_cache, dh);
      for (std::size_t i = 0; i < ge.params.size(); ++i) grads[i] = std::move(ge.params[i]);

      grad::adam_step(params, grads, adam);
    }
    curve.push_back(dataset_loss());
  }
  if (loss_curve) *loss_curve = curve;
  return model;
}

SeparatorModel train_separator(const ChannelDataset& data, const std::vector<Autoencoder>& aes,
                               const ArchConfig& arch, const grad::TrainConfig& cfg,
                               std::vector<double>* loss_curve) {
  const std::size_t channels = aes.size();
  if (channels == 0) throw std::invalid_argument("train_separator: no autoencoders");
  validate_channel_dataset(data, channels, arch.frame_len);

  SeparatorModel model;
  model.frame_len = arch.frame_len;
  model.trunk = make_trunk(arch, derive_seed(cfg.seed, 1));
  for (std::size_t c = 0; c < channels; ++c) {
    model.channel_classes.push_back(aes[c].class_id);
    model.heads.push_back(make_head(arch, derive_seed(cfg.seed, 200 + c)));
    model.decoders.push_back(aes[c].decoder);
    const Network& dec = model.decoders.back();
    if (dec.in_dim() != arch.latent || dec.out_dim() != arch.frame_len) {
      throw std::invalid_argument("train_separator: decoder dims do not match the architecture");
    }
  }

  // Only trunk and head parameters are optimized; decoders stay frozen.
  std::vector<Tensor*> params = grad::parameters(model.trunk);
  for (Network& head : model.heads) {
    for (Tensor* p : grad::parameters(head)) params.push_back(p);
  }
  grad::AdamState adam = grad::make_adam(params, cfg.lr);

  const StackedBatch full = stack_batch(data, all_indices(data.size()), channels);
  auto dataset_loss = [&]() {
    const Tensor z = grad::forward(model.trunk, full.mixture);
    std::vector<Tensor> preds;
    preds.reserve(channels);
    for (std::size_t c = 0; c < channels; ++c) {
      preds.push_back(grad::forward(model.decoders[c], grad::forward(model.heads[c], z)));
    }
    return grad::channel_mse(preds, full.targets);
  };

  std::vector<double> curve;
  curve.push_back(dataset_loss());

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
      const StackedBatch b = batch == data.size() ? full : stack_batch(data, chunk, channels);

      grad::ForwardCache trunk_cache;
      const Tensor z = grad::forward(model.trunk, b.mixture, &trunk_cache);

      std::vector<Tensor> grads(params.size());
      Tensor dz = Tensor::matrix(z.rows(), z.cols());
      std::size_t gi = 2 * model.trunk.layers.size();
      for (std::size_t c = 0; c < channels; ++c) {
        grad::ForwardCache head_cache, dec_cache;
        const Tensor latent = grad::forward(model.heads[c], z, &head_cache);
        const Tensor pred = grad::forward(model.decoders[c], latent, &dec_cache);
        Tensor dpred = grad::mse_grad(pred, b.targets[c]);
        scale_tensor(dpred, 1.0 / static_cast<double>(channels));
        // decoder parameter gradients are dropped: only the input gradient
        // flows back into the head
        grad::Gradients gd = grad::backward(model.decoders[c], dec_cache, dpred);
        grad::Gradients gh = grad::backward(model.heads[c], head_cache, gd.input);
        for (Tensor& pg : gh.params) grads[gi++] = std::move(pg);
        add_into(dz, gh.input);
      }
      grad::Gradients gt = grad::backward(model.trunk, trunk_cache, dz);
      for (std::size_t i = 0; i < gt.params.size(); ++i) grads[i] = std::move(gt.params[i]);

      grad::adam_step(params, grads, adam);
    }
    curve.push_back(dataset_loss());
  }
  if (loss_curve) *loss_curve = curve;
  return model;
}

namespace {

std::vector<signal::Waveform> run_channels(const Network& front,
                                           const std::vector<Network>* heads,
                                           const std::vector<Network>& decoders,
                                           std::size_t frame_len, const signal::Waveform& x) {
  if (x.samples.empty()) throw std::invalid_argument("separate: empty input");
  const Tensor frames = frame_tensor(x, frame_len);
  const Tensor shared = grad::forward(front, frames);
  std::vector<signal::Waveform> outs;
  outs.reserve(decoders.size());
  for (std::size_t c = 0; c < decoders.size(); ++c) {
    const Tensor latent = heads ? grad::forward((*heads)[c], shared) : shared;
    const Tensor pred = grad::forward(decoders[c], latent);
    outs.push_back(reassemble(pred, x.samples.size(), x.sample_rate_hz));
  }
  return outs;
}

}  // namespace

std::vector<signal::Waveform> separate(const Alg1Model& model, const signal::Waveform& x) {
  return run_channels(model.encoder, nullptr, model.decoders, model.frame_len, x);
}

std::vector<signal::Waveform> separate(const SeparatorModel& model, const signal::Waveform& x) {
  return run_channels(model.trunk, &model.heads, model.decoders, model.frame_len, x);
}

grad::Checkpoint to_checkpoint(const Autoencoder& ae) {
  grad::Checkpoint ckpt;
  ckpt.algorithm = "alg2-decoders";
  ckpt.channel_classes = {ae.class_id};
  ckpt.networks.emplace("encoder", ae.encoder);
  ckpt.networks.emplace("decoder", ae.decoder);
  ckpt.extra = nlohmann::json{{"frame_len", ae.encoder.in_dim()},
                              {"latent", ae.decoder.in_dim()}};
  return ckpt;
}

grad::Checkpoint to_checkpoint(const Alg1Model& model) {
  grad::Checkpoint ckpt;
  ckpt.algorithm = "alg1";
  ckpt.channel_classes = model.channel_classes;
  ckpt.networks.emplace("encoder", model.encoder);
  for (std::size_t c = 0; c < model.decoders.size(); ++c) {
    ckpt.networks.emplace("decoder." + model.channel_classes[c], model.decoders[c]);
  }
  ckpt.extra = nlohmann::json{{"frame_len", model.frame_len}};
  return ckpt;
}

grad::Checkpoint to_checkpoint(const SeparatorModel& model) {
  grad::Checkpoint ckpt;
  ckpt.algorithm = "alg3";
  ckpt.channel_classes = model.channel_classes;
  ckpt.networks.emplace("trunk", model.trunk);
  for (std::size_t c = 0; c < model.heads.size(); ++c) {
    ckpt.networks.emplace("head." + model.channel_classes[c], model.heads[c]);
    ckpt.networks.emplace("decoder." + model.channel_classes[c], model.decoders[c]);
  }
  ckpt.extra = nlohmann::json{{"frame_len", model.frame_len}};
  return ckpt;
}

namespace {

const Network& named_network(const grad::Checkpoint& ckpt, const std::string& name) {
  auto it = ckpt.networks.find(name);
  if (it == ckpt.networks.end()) {
    throw std::runtime_error("checkpoint is missing network '" + name + "'");
  }
  return it->second;
}

void require_tag(const grad::Checkpoint& ckpt, const std::string& tag) {
  if (ckpt.algorithm != tag) {
    throw std::runtime_error("checkpoint algorithm is '" + ckpt.algorithm + "', expected '" +
                             tag + "'");
  }
}

}  // namespace

Autoencoder autoencoder_from_checkpoint(const grad::Checkpoint& ckpt) {
  require_tag(ckpt, "alg2-decoders");
  if (ckpt.channel_classes.size() != 1) {
    throw std::runtime_error("autoencoder checkpoint must carry exactly one class");
  }
  Autoencoder ae;
  ae.class_id = ckpt.channel_classes[0];
  ae.encoder = named_network(ckpt, "encoder");
  ae.decoder = named_network(ckpt, "decoder");
  return ae;
}

Alg1Model alg1_from_checkpoint(const grad::Checkpoint& ckpt) {
  require_tag(ckpt, "alg1");
  Alg1Model model;
  model.channel_classes = ckpt.channel_classes;
  model.encoder = named_network(ckpt, "encoder");
  for (const std::string& cls : model.channel_classes) {
    model.decoders.push_back(named_network(ckpt, "decoder." + cls));
  }
  model.frame_len = ckpt.extra.value("frame_len", model.encoder.in_dim());
  return model;
}

SeparatorModel separator_from_checkpoint(const grad::Checkpoint& ckpt) {
  require_tag(ckpt, "alg3");
  SeparatorModel model;
  model.channel_classes = ckpt.channel_classes;
  model.trunk = named_network(ckpt, "trunk");
  for (const std::string& cls : model.channel_classes) {
    model.heads.push_back(named_network(ckpt, "head." + cls));
    model.decoders.push_back(named_network(ckpt, "decoder." + cls));
  }
  model.frame_len = ckpt.extra.value("frame_len", model.trunk.in_dim());
  return model;
}

}  // namespace chansep::algos
