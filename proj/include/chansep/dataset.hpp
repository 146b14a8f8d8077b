#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chansep/rng.hpp"
#include "chansep/synth.hpp"
#include "chansep/waveform.hpp"

namespace chansep::data {

// The four source classes, in channel order, and the eight presence
// patterns a mixture can have. Class A is ambient and never co-occurs
// with the others.
inline const std::vector<std::string>& class_ids() {
  static const std::vector<std::string> ids{"A", "B", "C", "D"};
  return ids;
}

inline const std::vector<std::string>& categories() {
  static const std::vector<std::string> cats{"A", "B", "C", "D", "BC", "BD", "CD", "BCD"};
  return cats;
}

std::array<bool, 4> category_mask(const std::string& category);
int category_target_count(const std::string& category);

std::array<signal::ClassSpec, 4> default_class_specs();

struct DatasetConfig {
  std::array<signal::ClassSpec, 4> classes = default_class_specs();
  std::uint32_t sample_rate_hz = 52734;
  std::size_t clip_len = 10547;  // ~200 ms at the default rate
  std::size_t per_category = 50;
  std::map<std::string, std::size_t> per_category_override;
  double train_frac = 0.6;
  double val_frac = 0.2;
  double test_frac = 0.2;
  double snr_lo_db = -5.0;
  double snr_hi_db = 5.0;
  std::uint64_t seed = 1;
};

std::size_t per_category_count(const DatasetConfig& cfg, const std::string& category);

// Throws std::invalid_argument when fractions do not sum to 1, the SNR
// range is empty, any category count is 0, or the clip is shorter than
// one minimal frame.
void validate_config(const DatasetConfig& cfg);

nlohmann::json dataset_config_to_json(const DatasetConfig& cfg);
DatasetConfig dataset_config_from_json(const nlohmann::json& j);
DatasetConfig load_dataset_config(const std::string& path);
void save_dataset_config(const DatasetConfig& cfg, const std::string& path);

// One manifest line. Paths are relative to the manifest's directory;
// absent classes have no target path.
struct MixtureRecord {
  std::string id;
  std::string category;
  std::string split;  // train | val | test
  std::string mixture_path;
  std::array<std::optional<std::string>, 4> target_paths;
  std::array<bool, 4> mask{};
  std::optional<double> g_bc_db;  // drawn SNR of the B reference to C
  std::optional<double> g_bd_db;  // drawn SNR of the B reference to D
};

nlohmann::json record_to_json(const MixtureRecord& rec);
MixtureRecord record_from_json(const nlohmann::json& j);
void write_manifest(const std::vector<MixtureRecord>& records, const std::string& path);
std::vector<MixtureRecord> read_manifest(const std::string& path);

// SNR draws for one record: g_bc when C is part of a multi-class mixture,
// g_bd when D is (g_bc first, then g_bd, from the same stream). Single-class
// records draw nothing.
struct SnrDraws {
  std::optional<double> g_bc_db;
  std::optional<double> g_bd_db;
};
SnrDraws draw_snrs(const std::string& category, Rng& rng, double lo_db, double hi_db);

// Largest-remainder apportionment of n records into train/val/test; ties
// break toward the earlier split.
std::array<std::size_t, 3> split_counts(std::size_t n, double train_frac, double val_frac,
                                        double test_frac);

struct BuiltRecord {
  MixtureRecord record;
  signal::Waveform mixture;
  std::array<std::optional<signal::Waveform>, 4> targets;  // post-scaling
};

struct BuildOptions {
  bool write_audio = true;  // WAVs under <out_dir>/audio
  bool keep_audio = true;   // keep waveforms in the returned records
  int jobs = 1;
};

struct BuildResult {
  std::vector<BuiltRecord> records;  // manifest order
  std::string manifest_path;         // "" when out_dir is empty
};

// Builds the corpus: every record synthesizes its sources from a seed
// derived from (cfg.seed, record index), scales C and D against the B
// reference (a virtual B with the real B's seed when B is absent), sums the
// mixture, and assigns splits per category by largest-remainder counts over
// a seeded shuffle. Deterministic for a fixed cfg, independent of jobs.
// Pass an empty out_dir to skip all file output.
BuildResult build_dataset(const DatasetConfig& cfg, const std::string& out_dir,
                          const BuildOptions& opts = {});

// Returns human-readable violations (empty = ok): mask/category mismatches,
// missing audio files, duplicate ids, bad splits, category imbalance > 1.
// Throws only when the manifest itself cannot be parsed.
std::vector<std::string> validate_manifest(const std::string& manifest_path);

}  // namespace chansep::data
