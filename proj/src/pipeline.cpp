#include "chansep/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "chansep/fragment.hpp"
#include "chansep/wav.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chansep::pipeline {

namespace fs = std::filesystem;

std::vector<LoadedRecord> load_split(const std::string& manifest_path, const std::string& split) {
  const std::vector<data::MixtureRecord> manifest = data::read_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<LoadedRecord> out;
  for (const data::MixtureRecord& rec : manifest) {
    if (!split.empty() && rec.split != split) continue;
    LoadedRecord lr;
    lr.meta = rec;
    lr.mixture = io::read_wav((base / rec.mixture_path).string());
    for (std::size_t c = 0; c < 4; ++c) {
      if (rec.target_paths[c]) {
        lr.targets[c] = io::read_wav((base / *rec.target_paths[c]).string());
      }
    }
    out.push_back(std::move(lr));
  }
  return out;
}

std::vector<LoadedRecord> from_build(const data::BuildResult& build, const std::string& split) {
  std::vector<LoadedRecord> out;
  for (const data::BuiltRecord& b : build.records) {
    if (!split.empty() && b.record.split != split) continue;
    if (b.mixture.samples.empty()) {
      throw std::invalid_argument("from_build: build did not keep audio in memory");
    }
    LoadedRecord lr;
    lr.meta = b.record;
    lr.mixture = b.mixture;
    lr.targets = b.targets;
    out.push_back(std::move(lr));
  }
  return out;
}

std::vector<signal::Waveform> class_sources(const std::vector<LoadedRecord>& records,
                                            std::size_t class_idx) {
  if (class_idx >= 4) throw std::invalid_argument("class index out of range");
  std::vector<signal::Waveform> out;
  for (const LoadedRecord& r : records) {
    if (r.targets[class_idx]) out.push_back(*r.targets[class_idx]);
  }
  return out;
}

algos::ChannelDataset channel_dataset(const std::vector<LoadedRecord>& records,
                                      std::size_t frame_len) {
  algos::ChannelDataset out;
  out.reserve(records.size());
  for (const LoadedRecord& r : records) {
    algos::ChannelRecord cr;
    cr.mixture = algos::frame_tensor(r.mixture, frame_len);
    for (std::size_t c = 0; c < 4; ++c) {
      cr.targets.push_back(r.targets[c] ? algos::frame_tensor(*r.targets[c], frame_len)
                                        : grad::Tensor::matrix(cr.mixture.rows(),
                                                               cr.mixture.cols()));
    }
    out.push_back(std::move(cr));
  }
  return out;
}

report::EvalReport evaluate_records(const std::string& algorithm,
                                    const std::vector<LoadedRecord>& records,
                                    const SeparateFn& separate_fn, int jobs) {
  if (records.empty()) throw std::invalid_argument("evaluate_records: no records");
  std::vector<std::vector<signal::Waveform>> outputs(records.size());

  auto run_one = [&](std::size_t i) { outputs[i] = separate_fn(records[i].mixture, i); };
#ifdef _OPENMP
  if (jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long long i = 0; i < static_cast<long long>(records.size()); ++i) {
      run_one(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < records.size(); ++i) run_one(i);
  }
#else
  for (std::size_t i = 0; i < records.size(); ++i) run_one(i);
#endif

  std::vector<report::RecordEval> evals;
  evals.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LoadedRecord& r = records[i];
    report::RecordEval ev;
    ev.category = r.meta.category;
    for (std::size_t c = 0; c < 4; ++c) {
      ev.active.push_back(r.meta.mask[c]);
      ev.refs.push_back(r.targets[c] ? *r.targets[c] : signal::Waveform{});
    }
    ev.outputs = outputs[i];
    evals.push_back(std::move(ev));
  }
  return report::evaluate_dataset(algorithm, evals, data::class_ids());
}

std::vector<grad::Network> decoder_stack(const std::vector<algos::Autoencoder>& aes) {
  std::vector<grad::Network> decoders;
  decoders.reserve(aes.size());
  for (const algos::Autoencoder& ae : aes) decoders.push_back(ae.decoder);
  return decoders;
}

ExperimentConfig demo_config() {
  ExperimentConfig cfg;
  cfg.dataset.sample_rate_hz = 8000;
  cfg.dataset.clip_len = 2048;
  cfg.dataset.per_category = 24;
  cfg.dataset.seed = 7;

  cfg.ae_train = {200, 0.001, 8, 101};
  cfg.alg1_train = {200, 0.001, 8, 202};
  cfg.alg3_train = {200, 0.001, 8, 303};
  cfg.search.seed = 404;
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                std::ostream* log) {
  const fs::path root(out_dir);
  const fs::path models = root / "models";
  fs::create_directories(models);

  const data::BuildResult build =
      data::build_dataset(cfg.dataset, (root / "data").string(),
                          {.write_audio = true, .keep_audio = false, .jobs = cfg.jobs});
  if (log) {
    *log << "dataset: " << build.records.size() << " records -> " << build.manifest_path << "\n";
  }

  const std::vector<LoadedRecord> train = load_split(build.manifest_path, "train");
  const std::vector<LoadedRecord> test = load_split(build.manifest_path, "test");
  if (log) *log << "loaded " << train.size() << " train / " << test.size() << " test records\n";

  ExperimentResult result;

  for (std::size_t c = 0; c < 4; ++c) {
    grad::TrainConfig tc = cfg.ae_train;
    tc.seed = derive_seed(cfg.ae_train.seed, c);
    std::vector<double> curve;
    result.aes.push_back(algos::train_autoencoder(class_sources(train, c), cfg.arch, tc,
                                                  data::class_ids()[c], &curve));
    grad::save_checkpoint(models / ("ae_" + data::class_ids()[c] + ".json"),
                          algos::to_checkpoint(result.aes.back()));
    if (log) {
      *log << "autoencoder " << data::class_ids()[c] << ": loss " << curve.front() << " -> "
           << curve.back() << "\n";
    }
  }

  const algos::ChannelDataset channel_train = channel_dataset(train, cfg.arch.frame_len);
  {
    std::vector<double> curve;
    result.alg1 = algos::train_alg1(channel_train, data::class_ids(), cfg.arch, cfg.alg1_train,
                                    &curve);
    grad::save_checkpoint(models / "alg1.json", algos::to_checkpoint(result.alg1));
    if (log) *log << "alg1: loss " << curve.front() << " -> " << curve.back() << "\n";
  }
  {
    std::vector<double> curve;
    result.alg3 = algos::train_separator(channel_train, result.aes, cfg.arch, cfg.alg3_train,
                                         &curve);
    grad::save_checkpoint(models / "alg3.json", algos::to_checkpoint(result.alg3));
    if (log) *log << "alg3: loss " << curve.front() << " -> " << curve.back() << "\n";
  }

  const report::EvalReport rep1 = evaluate_records(
      "alg1", test, [&](const signal::Waveform& x, std::size_t) { return separate(result.alg1, x); },
      cfg.jobs);
  if (log) *log << "evaluated alg1 on " << test.size() << " records\n";

  const std::vector<grad::Network> decoders = decoder_stack(result.aes);
  const report::EvalReport rep2 = evaluate_records(
      "alg2", test,
      [&](const signal::Waveform& x, std::size_t idx) {
        algos::LatentSearchConfig sc = cfg.search;
        sc.seed = derive_seed(cfg.search.seed, idx);
        return algos::latent_search(x, decoders, sc).outputs;
      },
      cfg.jobs);
  if (log) *log << "evaluated alg2 on " << test.size() << " records\n";

  const report::EvalReport rep3 = evaluate_records(
      "alg3", test, [&](const signal::Waveform& x, std::size_t) { return separate(result.alg3, x); },
      cfg.jobs);
  if (log) *log << "evaluated alg3 on " << test.size() << " records\n";

  result.report.rows = rep1.rows;
  result.report.rows.insert(result.report.rows.end(), rep2.rows.begin(), rep2.rows.end());
  result.report.rows.insert(result.report.rows.end(), rep3.rows.begin(), rep3.rows.end());

  report::write_csv(result.report, (root / "report.csv").string());
  std::ofstream tables(root / "tables.txt", std::ios::binary);
  tables << report::render_tables(result.report);
  if (log) *log << "wrote " << (root / "report.csv").string() << "\n";
  return result;
}

}  // namespace chansep::pipeline
