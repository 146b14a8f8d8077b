#pragma once

#include <cstdint>
#include <vector>

#include "chansep/network.hpp"
#include "chansep/waveform.hpp"

namespace chansep::algos {

// Test-time search over decoder inputs: finds per-channel latent variables
// whose decoded sum best reconstructs the observed mixture.
struct LatentSearchConfig {
  std::vector<double> lr_candidates{0.1, 0.01, 0.001};
  int epochs = 100;
  bool zeros_init = true;      // include one all-zeros run per lr candidate
  int gaussian_restarts = 1;   // additional seeded-Gaussian runs per lr candidate
  double gaussian_sigma = 0.1;
  std::uint64_t seed = 0;
};

struct LatentRun {
  double lr = 0.0;
  int restart = 0;  // 0 = zeros init, >=1 = Gaussian restart index
  double final_loss = 0.0;
};

struct LatentSearchResult {
  std::vector<grad::Tensor> latents;        // per channel, fragments x latent width
  std::vector<signal::Waveform> outputs;    // per channel, same length as the input
  double best_loss = 0.0;
  double best_lr = 0.0;
  int best_restart = 0;
  std::vector<LatentRun> runs;              // every (lr, restart) candidate, in run order
};

// Runs `epochs` Adam steps on the latents for every (lr, restart) candidate
// and returns the run with the smallest final loss. Decoder parameters are
// never modified. Throws on an empty decoder list, mismatched decoder output
// widths, no lr candidates, no runs, or epochs < 1.
LatentSearchResult latent_search(const signal::Waveform& x,
                                 const std::vector<grad::Network>& decoders,
                                 const LatentSearchConfig& cfg);

}  // namespace chansep::algos
