#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chansep/algos.hpp"
#include "chansep/dataset.hpp"
#include "chansep/latent_search.hpp"
#include "chansep/report.hpp"

namespace chansep::pipeline {

// One manifest record with its audio in memory.
struct LoadedRecord {
  data::MixtureRecord meta;
  signal::Waveform mixture;
  std::array<std::optional<signal::Waveform>, 4> targets;
};

// Reads the manifest and the referenced WAVs. split "" loads everything.
std::vector<LoadedRecord> load_split(const std::string& manifest_path, const std::string& split);

// Same view over an in-memory build (requires keep_audio).
std::vector<LoadedRecord> from_build(const data::BuildResult& build, const std::string& split);

// Clean sources of one class across the given records (post-scaling targets
// wherever the class is active) — the autoencoder training set.
std::vector<signal::Waveform> class_sources(const std::vector<LoadedRecord>& records,
                                            std::size_t class_idx);

// Fragment pairs for channel training: mixture rows against per-channel
// target rows, zeros where the class is absent.
algos::ChannelDataset channel_dataset(const std::vector<LoadedRecord>& records,
                                      std::size_t frame_len);

// Runs separate_fn over every record (optionally in parallel) and aggregates
// the outputs. separate_fn receives the record index for per-record seeding.
using SeparateFn =
    std::function<std::vector<signal::Waveform>(const signal::Waveform&, std::size_t)>;
report::EvalReport evaluate_records(const std::string& algorithm,
                                    const std::vector<LoadedRecord>& records,
                                    const SeparateFn& separate_fn, int jobs = 1);

// Channel-order decoder list of a set of per-class autoencoders.
std::vector<grad::Network> decoder_stack(const std::vector<algos::Autoencoder>& aes);

// Everything one end-to-end run needs. demo_config() is sized to finish the
// whole experiment in minutes on a laptop.
struct ExperimentConfig {
  data::DatasetConfig dataset;
  algos::ArchConfig arch;
  grad::TrainConfig ae_train;
  grad::TrainConfig alg1_train;
  grad::TrainConfig alg3_train;
  algos::LatentSearchConfig search;
  int jobs = 1;
};

ExperimentConfig demo_config();

struct ExperimentResult {
  std::vector<algos::Autoencoder> aes;  // channel order A..D
  algos::Alg1Model alg1;
  algos::SeparatorModel alg3;
  report::EvalReport report;            // alg1 + alg2 + alg3 rows
};

// Builds the dataset under <out_dir>/data, trains the per-class
// autoencoders and both trained models, evaluates all three algorithms on
// the test split, and writes checkpoints, report.csv and tables.txt under
// out_dir. Deterministic for a fixed config. Progress goes to log when set.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                std::ostream* log = nullptr);

}  // namespace chansep::pipeline
