#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chansep/checkpoint.hpp"
#include "chansep/network.hpp"
#include "chansep/train.hpp"
#include "chansep/waveform.hpp"

namespace chansep::algos {

// Desk-scale layer sizing shared by all three algorithms. A hidden width of
// zero collapses the corresponding stack to a single linear layer.
struct ArchConfig {
  std::size_t frame_len = 64;    // L
  std::size_t latent = 32;       // R
  std::size_t enc_hidden = 96;
  std::size_t dec_hidden = 96;
  std::size_t trunk_width = 64;  // R', separator trunk output
};

grad::Network make_encoder(const ArchConfig& arch, std::uint64_t seed);
grad::Network make_decoder(const ArchConfig& arch, std::uint64_t seed);

// Per-class autoencoder (first step of the two-step algorithms).
struct Autoencoder {
  std::string class_id;
  grad::Network encoder;  // L -> R
  grad::Network decoder;  // R -> L
};

// Joint fixed-channel model: one shared encoder, one decoder per channel.
struct Alg1Model {
  std::vector<std::string> channel_classes;
  std::size_t frame_len = 0;
  grad::Network encoder;
  std::vector<grad::Network> decoders;
};

// Separator over frozen decoders: shared trunk, one head per channel.
struct SeparatorModel {
  std::vector<std::string> channel_classes;
  std::size_t frame_len = 0;
  grad::Network trunk;                  // L -> R'
  std::vector<grad::Network> heads;     // R' -> R
  std::vector<grad::Network> decoders;  // frozen copies, R -> L
};

// One mixture record prepared for channel training: mixture fragments plus
// per-channel target fragments (zeros where the class is absent).
struct ChannelRecord {
  grad::Tensor mixture;
  std::vector<grad::Tensor> targets;
};
using ChannelDataset = std::vector<ChannelRecord>;

Autoencoder train_autoencoder(const std::vector<signal::Waveform>& class_samples,
                              const ArchConfig& arch, const grad::TrainConfig& cfg,
                              const std::string& class_id = "",
                              std::vector<double>* loss_curve = nullptr);

Alg1Model train_alg1(const ChannelDataset& data, const std::vector<std::string>& classes,
                     const ArchConfig& arch, const grad::TrainConfig& cfg,
                     std::vector<double>* loss_curve = nullptr);

SeparatorModel train_separator(const ChannelDataset& data, const std::vector<Autoencoder>& aes,
                               const ArchConfig& arch, const grad::TrainConfig& cfg,
                               std::vector<double>* loss_curve = nullptr);

std::vector<signal::Waveform> separate(const Alg1Model& model, const signal::Waveform& x);
std::vector<signal::Waveform> separate(const SeparatorModel& model, const signal::Waveform& x);

// Checkpoint adapters. Autoencoder files carry the "alg2-decoders" tag; the
// set of per-class files is algorithm 2's model.
grad::Checkpoint to_checkpoint(const Autoencoder& ae);
grad::Checkpoint to_checkpoint(const Alg1Model& model);
grad::Checkpoint to_checkpoint(const SeparatorModel& model);
Autoencoder autoencoder_from_checkpoint(const grad::Checkpoint& ckpt);
Alg1Model alg1_from_checkpoint(const grad::Checkpoint& ckpt);
SeparatorModel separator_from_checkpoint(const grad::Checkpoint& ckpt);

}  // namespace chansep::algos
