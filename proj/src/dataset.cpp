#include "chansep/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chansep/wav.hpp"

namespace chansep::data {

namespace fs = std::filesystem;

std::array<bool, 4> category_mask(const std::string& category) {
  const auto& cats = categories();
  if (std::find(cats.begin(), cats.end(), category) == cats.end()) {
    throw std::invalid_argument("unknown mixture category: " + category);
  }
  std::array<bool, 4> mask{};
  for (char c : category) {
    mask[static_cast<std::size_t>(c - 'A')] = true;
  }
  return mask;
}

int category_target_count(const std::string& category) {
  const auto mask = category_mask(category);
  return static_cast<int>(std::count(mask.begin(), mask.end(), true));
}

std::array<signal::ClassSpec, 4> default_class_specs() {
  std::array<signal::ClassSpec, 4> specs;
  specs[0].family = signal::SourceFamily::AmbientNoise;
  specs[1].family = signal::SourceFamily::HarmonicComplex;
  specs[2].family = signal::SourceFamily::AmBroadband;
  specs[3].family = signal::SourceFamily::ImpulsiveClicks;
  return specs;
}

std::size_t per_category_count(const DatasetConfig& cfg, const std::string& category) {
  auto it = cfg.per_category_override.find(category);
  return it != cfg.per_category_override.end() ? it->second : cfg.per_category;
}

void validate_config(const DatasetConfig& cfg) {
  if (cfg.sample_rate_hz == 0) throw std::invalid_argument("sample_rate_hz must be positive");
  if (cfg.clip_len < 2) throw std::invalid_argument("clip is shorter than one minimal frame");
  if (cfg.train_frac < 0 || cfg.val_frac < 0 || cfg.test_frac < 0 ||
      std::abs(cfg.train_frac + cfg.val_frac + cfg.test_frac - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must be nonnegative and sum to 1");
  }
  if (!(cfg.snr_lo_db < cfg.snr_hi_db)) throw std::invalid_argument("empty SNR range");
  for (const auto& [cat, n] : cfg.per_category_override) {
    category_mask(cat);  // throws on unknown categories
    if (n == 0) throw std::invalid_argument("category " + cat + " requests 0 records");
  }
  if (cfg.per_category == 0 && cfg.per_category_override.size() < categories().size()) {
    throw std::invalid_argument("per-category count must be at least 1");
  }
}

nlohmann::json dataset_config_to_json(const DatasetConfig& cfg) {
  nlohmann::json classes;
  for (std::size_t c = 0; c < 4; ++c) {
    classes[class_ids()[c]] = signal::class_spec_to_json(cfg.classes[c]);
  }
  nlohmann::json j{{"classes", classes},
                   {"sample_rate_hz", cfg.sample_rate_hz},
                   {"clip_len", cfg.clip_len},
                   {"split_fractions", {cfg.train_frac, cfg.val_frac, cfg.test_frac}},
                   {"snr_range_db", {cfg.snr_lo_db, cfg.snr_hi_db}},
                   {"seed", cfg.seed}};
  if (cfg.per_category_override.empty()) {
    j["per_category"] = cfg.per_category;
  } else {
    nlohmann::json counts;
    for (const std::string& cat : categories()) {
      counts[cat] = per_category_count(cfg, cat);
    }
    j["per_category"] = counts;
  }
  return j;
}

DatasetConfig dataset_config_from_json(const nlohmann::json& j) {
  DatasetConfig cfg;
  if (j.contains("classes")) {
    for (std::size_t c = 0; c < 4; ++c) {
      const std::string& id = class_ids()[c];
      if (j["classes"].contains(id)) {
        cfg.classes[c] = signal::class_spec_from_json(j["classes"][id]);
      }
    }
  }
  cfg.sample_rate_hz = j.value("sample_rate_hz", cfg.sample_rate_hz);
  cfg.clip_len = j.value("clip_len", cfg.clip_len);
  if (j.contains("per_category")) {
    if (j["per_category"].is_object()) {
      for (auto it = j["per_category"].begin(); it != j["per_category"].end(); ++it) {
        cfg.per_category_override[it.key()] = it.value().get<std::size_t>();
      }
    } else {
      cfg.per_category = j["per_category"].get<std::size_t>();
    }
  }
  if (j.contains("split_fractions")) {
    const auto& f = j["split_fractions"];
    if (!f.is_array() || f.size() != 3) {
      throw std::invalid_argument("split_fractions must be [train, val, test]");
    }
    cfg.train_frac = f[0].get<double>();
    cfg.val_frac = f[1].get<double>();
    cfg.test_frac = f[2].get<double>();
  }
  if (j.contains("snr_range_db")) {
    const auto& r = j["snr_range_db"];
    if (!r.is_array() || r.size() != 2) throw std::invalid_argument("snr_range_db must be [lo, hi]");
    cfg.snr_lo_db = r[0].get<double>();
    cfg.snr_hi_db = r[1].get<double>();
  }
  cfg.seed = j.value("seed", cfg.seed);
  validate_config(cfg);
  return cfg;
}

DatasetConfig load_dataset_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset config: " + path);
  nlohmann::json j;
  in >> j;
  return dataset_config_from_json(j);
}

void save_dataset_config(const DatasetConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open dataset config for writing: " + path);
  out << dataset_config_to_json(cfg).dump(1) << "\n";
}

nlohmann::json record_to_json(const MixtureRecord& rec) {
  nlohmann::json targets, mask;
  for (std::size_t c = 0; c < 4; ++c) {
    const std::string& id = class_ids()[c];
    targets[id] = rec.target_paths[c] ? nlohmann::json(*rec.target_paths[c]) : nullptr;
    mask[id] = rec.mask[c];
  }
  return nlohmann::json{{"id", rec.id},
                        {"category", rec.category},
                        {"split", rec.split},
                        {"mixture", rec.mixture_path},
                        {"targets", targets},
                        {"mask", mask},
                        {"g_bc_db", rec.g_bc_db ? nlohmann::json(*rec.g_bc_db) : nullptr},
                        {"g_bd_db", rec.g_bd_db ? nlohmann::json(*rec.g_bd_db) : nullptr}};
}

MixtureRecord record_from_json(const nlohmann::json& j) {
  MixtureRecord rec;
  rec.id = j.at("id").get<std::string>();
  rec.category = j.at("category").get<std::string>();
  rec.split = j.at("split").get<std::string>();
  rec.mixture_path = j.at("mixture").get<std::string>();
  for (std::size_t c = 0; c < 4; ++c) {
    const std::string& id = class_ids()[c];
    const auto& t = j.at("targets").at(id);
    if (!t.is_null()) rec.target_paths[c] = t.get<std::string>();
    rec.mask[c] = j.at("mask").at(id).get<bool>();
  }
  if (j.contains("g_bc_db") && !j["g_bc_db"].is_null()) rec.g_bc_db = j["g_bc_db"].get<double>();
  if (j.contains("g_bd_db") && !j["g_bd_db"].is_null()) rec.g_bd_db = j["g_bd_db"].get<double>();
  return rec;
}

void write_manifest(const std::vector<MixtureRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open manifest for writing: " + path);
  for (const MixtureRecord& rec : records) {
    out << record_to_json(rec).dump() << "\n";
  }
  if (!out) throw std::runtime_error("failed writing manifest: " + path);
}

std::vector<MixtureRecord> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<MixtureRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("manifest " + path + " line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return records;
}

SnrDraws draw_snrs(const std::string& category, Rng& rng, double lo_db, double hi_db) {
  const auto mask = category_mask(category);
  SnrDraws draws;
  if (category_target_count(category) < 2) return draws;  // nothing to scale
  if (mask[2]) draws.g_bc_db = rng.uniform(lo_db, hi_db);
  if (mask[3]) draws.g_bd_db = rng.uniform(lo_db, hi_db);
  return draws;
}

std::array<std::size_t, 3> split_counts(std::size_t n, double train_frac, double val_frac,
                                        double test_frac) {
  const std::array<double, 3> fracs{train_frac, val_frac, test_frac};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double quota = fracs[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainders[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  // largest remainder first; ties resolve in train, val, test order
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < n; ++i) {
    ++counts[order[i % 3]];
    ++assigned;
  }
  return counts;
}

namespace {

// salt spaces for seed derivation: record ids and split shuffles never collide
constexpr std::uint64_t kRecordSalt = 1ULL << 32;
constexpr std::uint64_t kSplitSalt = 2ULL << 32;

// within one record: 1 = SNR stream, 10+c = class c's source
constexpr std::uint64_t kSnrStreamSalt = 1;
constexpr std::uint64_t kSourceSaltBase = 10;

BuiltRecord build_record(const DatasetConfig& cfg, const std::string& category,
                         std::uint64_t record_seed) {
  const auto mask = category_mask(category);
  const bool multi = category_target_count(category) >= 2;

  BuiltRecord built;
  built.record.category = category;
  built.record.mask = mask;

  std::array<std::optional<signal::Waveform>, 4> raw;
  for (std::size_t c = 0; c < 4; ++c) {
    if (!mask[c]) continue;
    raw[c] = signal::synth_source(cfg.classes[c], derive_seed(record_seed, kSourceSaltBase + c),
                                  cfg.clip_len, cfg.sample_rate_hz);
  }

  if (multi) {
    Rng snr_rng(derive_seed(record_seed, kSnrStreamSalt));
    const SnrDraws draws = draw_snrs(category, snr_rng, cfg.snr_lo_db, cfg.snr_hi_db);
    built.record.g_bc_db = draws.g_bc_db;
    built.record.g_bd_db = draws.g_bd_db;

    // B anchors the SNR; when B is absent (category CD) a virtual B with
    // the seed a real B would have had anchors both scalings
    signal::Waveform reference =
        mask[1] ? *raw[1]
                : signal::synth_source(cfg.classes[1], derive_seed(record_seed, kSourceSaltBase + 1),
                                       cfg.clip_len, cfg.sample_rate_hz);

    for (std::size_t c = 0; c < 4; ++c) {
      if (!mask[c]) continue;
      if (c == 2 && draws.g_bc_db) {
        built.targets[c] = signal::scale_to_snr(*raw[c], reference, *draws.g_bc_db);
      } else if (c == 3 && draws.g_bd_db) {
        built.targets[c] = signal::scale_to_snr(*raw[c], reference, *draws.g_bd_db);
      } else {
        built.targets[c] = std::move(*raw[c]);
      }
    }
  } else {
    for (std::size_t c = 0; c < 4; ++c) {
      if (mask[c]) built.targets[c] = std::move(*raw[c]);
    }
  }

  std::vector<signal::Waveform> present;
  for (std::size_t c = 0; c < 4; ++c) {
    if (built.targets[c]) present.push_back(*built.targets[c]);
  }
  built.mixture = signal::mix(present);

  // joint rescale to unit peak: keeps every pairwise SNR and the sum
  // relation intact while preventing PCM16 clipping on disk
  double peak = 0.0;
  for (double v : built.mixture.samples) peak = std::max(peak, std::abs(v));
  for (const auto& t : built.targets) {
    if (!t) continue;
    for (double v : t->samples) peak = std::max(peak, std::abs(v));
  }
  if (peak > 1.0) {
    const double a = 1.0 / peak;
    for (double& v : built.mixture.samples) v *= a;
    for (auto& t : built.targets) {
      if (!t) continue;
      for (double& v : t->samples) v *= a;
    }
  }
  return built;
}

}  // namespace

BuildResult build_dataset(const DatasetConfig& cfg, const std::string& out_dir,
                          const BuildOptions& opts) {
  validate_config(cfg);

  const bool to_disk = !out_dir.empty();
  fs::path audio_dir;
  if (to_disk) {
    audio_dir = fs::path(out_dir) / "audio";
    fs::create_directories(audio_dir);
  }

  // record plan in manifest order: categories in canonical order
  struct Planned {
    std::string category;
    std::size_t index_in_category;
  };
  std::vector<Planned> plan;
  for (const std::string& cat : categories()) {
    const std::size_t n = per_category_count(cfg, cat);
    for (std::size_t i = 0; i < n; ++i) plan.push_back({cat, i});
  }

  // per-category split labels: largest-remainder counts over a seeded shuffle
  std::map<std::string, std::vector<std::string>> split_of;
  for (std::size_t ci = 0; ci < categories().size(); ++ci) {
    const std::string& cat = categories()[ci];
    const std::size_t n = per_category_count(cfg, cat);
    const auto counts = split_counts(n, cfg.train_frac, cfg.val_frac, cfg.test_frac);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(derive_seed(cfg.seed, kSplitSalt + ci));
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_int(i)]);
    std::vector<std::string> labels(n);
    std::size_t at = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      static const char* kSplits[3] = {"train", "val", "test"};
      for (std::size_t k = 0; k < counts[s]; ++k) labels[perm[at++]] = kSplits[s];
    }
    split_of[cat] = std::move(labels);
  }

  BuildResult result;
  result.records.resize(plan.size());

  auto build_one = [&](std::size_t idx) {
    const Planned& p = plan[idx];
    BuiltRecord built =
        build_record(cfg, p.category, derive_seed(cfg.seed, kRecordSalt + idx));
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%05zu", p.index_in_category);
    built.record.id = p.category + suffix;
    built.record.split = split_of[p.category][p.index_in_category];
    built.record.mixture_path = "audio/" + built.record.id + "_mix.wav";
    for (std::size_t c = 0; c < 4; ++c) {
      if (built.record.mask[c]) {
        built.record.target_paths[c] = "audio/" + built.record.id + "_" + class_ids()[c] + ".wav";
      }
    }
    if (to_disk && opts.write_audio) {
      io::write_wav(built.mixture, (fs::path(out_dir) / built.record.mixture_path).string());
      for (std::size_t c = 0; c < 4; ++c) {
        if (!built.targets[c]) continue;
        io::write_wav(*built.targets[c],
                      (fs::path(out_dir) / *built.record.target_paths[c]).string());
      }
    }
    if (!opts.keep_audio) {
      built.mixture.samples.clear();
      for (auto& t : built.targets) {
        if (t) t->samples.clear();
      }
    }
    result.records[idx] = std::move(built);
  };

#ifdef _OPENMP
  if (opts.jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(opts.jobs)
    for (long long idx = 0; idx < static_cast<long long>(plan.size()); ++idx) {
      build_one(static_cast<std::size_t>(idx));
    }
  } else {
    for (std::size_t idx = 0; idx < plan.size(); ++idx) build_one(idx);
  }
#else
  for (std::size_t idx = 0; idx < plan.size(); ++idx) build_one(idx);
#endif

  if (to_disk) {
    std::vector<MixtureRecord> manifest;
    manifest.reserve(result.records.size());
    for (const BuiltRecord& b : result.records) manifest.push_back(b.record);
    result.manifest_path = (fs::path(out_dir) / "manifest.jsonl").string();
    write_manifest(manifest, result.manifest_path);
  }
  return result;
}

std::vector<std::string> validate_manifest(const std::string& manifest_path) {
  const std::vector<MixtureRecord> records = read_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<std::string> violations;
  std::set<std::string> seen_ids;
  std::map<std::string, std::size_t> category_counts;

  for (const MixtureRecord& rec : records) {
    if (!seen_ids.insert(rec.id).second) {
      violations.push_back(rec.id + ": duplicate record id");
    }
    std::array<bool, 4> expected{};
    try {
      expected = category_mask(rec.category);
    } catch (const std::exception&) {
      violations.push_back(rec.id + ": unknown category '" + rec.category + "'");
      continue;
    }
    ++category_counts[rec.category];
    if (rec.mask != expected) {
      violations.push_back(rec.id + ": mask does not match category " + rec.category);
    }
    if (rec.split != "train" && rec.split != "val" && rec.split != "test") {
      violations.push_back(rec.id + ": unknown split '" + rec.split + "'");
    }
    for (std::size_t c = 0; c < 4; ++c) {
      if (rec.mask[c] != rec.target_paths[c].has_value()) {
        violations.push_back(rec.id + ": target path presence disagrees with mask for class " +
                             class_ids()[c]);
      }
    }
    if (!fs::exists(base / rec.mixture_path)) {
      violations.push_back(rec.id + ": missing mixture file " + rec.mixture_path);
    }
    for (std::size_t c = 0; c < 4; ++c) {
      if (rec.target_paths[c] && !fs::exists(base / *rec.target_paths[c])) {
        violations.push_back(rec.id + ": missing target file " + *rec.target_paths[c]);
      }
    }
  }

  if (!category_counts.empty()) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& [cat, n] : category_counts) {
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    if (hi - lo > 1) {
      violations.push_back("category imbalance: counts range from " + std::to_string(lo) +
                           " to " + std::to_string(hi));
    }
  }
  return violations;
}

}  // namespace chansep::data
