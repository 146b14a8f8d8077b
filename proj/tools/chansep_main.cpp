#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chansep/pipeline.hpp"
#include "chansep/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chansep;

namespace {

json arch_json(const algos::ArchConfig& a) {
  return json{{"frame_len", a.frame_len},
              {"latent", a.latent},
              {"enc_hidden", a.enc_hidden},
              {"dec_hidden", a.dec_hidden},
              {"trunk_width", a.trunk_width}};
}

json train_json(const grad::TrainConfig& t) {
  return json{{"epochs", t.epochs}, {"lr", t.lr}, {"batch_size", t.batch_size}};
}

json search_json(const algos::LatentSearchConfig& s) {
  return json{{"lr_candidates", s.lr_candidates},
              {"epochs", s.epochs},
              {"zeros_init", s.zeros_init},
              {"gaussian_restarts", s.gaussian_restarts},
              {"gaussian_sigma", s.gaussian_sigma}};
}

void print_config(const json& cfg, std::uint64_t seed) {
  std::cout << "config: " << cfg.dump() << "\n";
  std::cout << "seed: " << seed << "\n";
}

void add_arch_flags(CLI::App* cmd, algos::ArchConfig& arch) {
  cmd->add_option("--frame-len", arch.frame_len, "Fragment length L (even)")
      ->capture_default_str();
  cmd->add_option("--latent", arch.latent, "Latent width R")->capture_default_str();
  cmd->add_option("--enc-hidden", arch.enc_hidden, "Encoder hidden width (0 = linear)")
      ->capture_default_str();
  cmd->add_option("--dec-hidden", arch.dec_hidden, "Decoder hidden width (0 = linear)")
      ->capture_default_str();
  cmd->add_option("--trunk-width", arch.trunk_width, "Separator trunk width R'")
      ->capture_default_str();
}

void add_train_flags(CLI::App* cmd, grad::TrainConfig& train) {
  cmd->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--lr", train.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch", train.batch_size, "Records per mini-batch (0 = full batch)")
      ->capture_default_str();
  cmd->add_option("--seed", train.seed, "Training seed")->capture_default_str();
}

void add_search_flags(CLI::App* cmd, algos::LatentSearchConfig& search) {
  cmd->add_option("--lrs", search.lr_candidates, "Learning-rate candidates")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--search-epochs", search.epochs, "Adam steps per candidate")
      ->capture_default_str();
  cmd->add_option("--restarts", search.gaussian_restarts, "Gaussian restarts per lr")
      ->capture_default_str();
  cmd->add_option("--sigma", search.gaussian_sigma, "Gaussian init sigma")
      ->capture_default_str();
  cmd->add_option("--seed", search.seed, "Search seed")->capture_default_str();
}

// Loads per-class autoencoder checkpoints and orders them A..D.
std::vector<algos::Autoencoder> load_aes(const std::vector<std::string>& paths) {
  std::map<std::string, algos::Autoencoder> by_class;
  for (const std::string& p : paths) {
    algos::Autoencoder ae = algos::autoencoder_from_checkpoint(grad::load_checkpoint(p));
    if (!by_class.emplace(ae.class_id, std::move(ae)).second) {
      throw std::runtime_error("duplicate autoencoder for class " + ae.class_id);
    }
  }
  std::vector<algos::Autoencoder> ordered;
  for (const std::string& cls : data::class_ids()) {
    auto it = by_class.find(cls);
    if (it == by_class.end()) {
      throw std::runtime_error("missing autoencoder checkpoint for class " + cls);
    }
    ordered.push_back(std::move(it->second));
  }
  return ordered;
}

struct SearchRecordResult {
  std::string id;
  double best_lr = 0.0;
  int best_restart = 0;
  double best_loss = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chansep: single-channel source separation with fixed class channels"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Build a synthetic mixture corpus");
  std::string synth_config, synth_out;
  std::uint64_t synth_seed = 0;
  bool synth_seed_set = false;
  int synth_jobs = 1;
  synth->add_option("--config", synth_config, "Dataset config JSON")
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the config's master seed")
      ->each([&](const std::string&) { synth_seed_set = true; });
  synth->add_option("--jobs", synth_jobs, "Parallel synthesis jobs")->capture_default_str();

  // ---- train-ae ----
  auto* train_ae = app.add_subcommand("train-ae", "Train one class's autoencoder");
  std::string ta_class, ta_manifest, ta_out, ta_split = "train";
  algos::ArchConfig ta_arch;
  grad::TrainConfig ta_train;
  train_ae->add_option("--class", ta_class, "Class id (A, B, C or D)")->required();
  train_ae->add_option("--manifest", ta_manifest, "Dataset manifest")->required();
  train_ae->add_option("--out", ta_out, "Checkpoint path")->required();
  train_ae->add_option("--split", ta_split, "Manifest split to train on")->capture_default_str();
  add_arch_flags(train_ae, ta_arch);
  add_train_flags(train_ae, ta_train);

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train the joint model (alg1) or separator (alg3)");
  std::string tr_alg, tr_manifest, tr_out, tr_split = "train";
  std::vector<std::string> tr_aes;
  algos::ArchConfig tr_arch;
  grad::TrainConfig tr_train;
  train->add_option("--alg", tr_alg, "alg1 or alg3")->required()
      ->check(CLI::IsMember({"alg1", "alg3"}));
  train->add_option("--manifest", tr_manifest, "Dataset manifest")->required();
  train->add_option("--out", tr_out, "Checkpoint path")->required();
  train->add_option("--split", tr_split, "Manifest split to train on")->capture_default_str();
  train->add_option("--ae", tr_aes, "Autoencoder checkpoints (alg3; one per class)");
  add_arch_flags(train, tr_arch);
  add_train_flags(train, tr_train);

  // ---- search ----
  auto* search = app.add_subcommand("search", "Per-sample latent search (alg2)");
  std::string se_alg = "alg2", se_manifest, se_out, se_split = "test";
  std::vector<std::string> se_aes;
  algos::LatentSearchConfig se_cfg;
  int se_jobs = 1;
  search->add_option("--alg", se_alg, "Must be alg2")->check(CLI::IsMember({"alg2"}));
  search->add_option("--manifest", se_manifest, "Dataset manifest")->required();
  search->add_option("--ae", se_aes, "Autoencoder checkpoints (one per class)")->required();
  search->add_option("--out", se_out, "Output directory for separated WAVs and the log")
      ->required();
  search->add_option("--split", se_split, "Manifest split to search")->capture_default_str();
  search->add_option("--jobs", se_jobs, "Parallel searches")->capture_default_str();
  add_search_flags(search, se_cfg);

  // ---- separate ----
  auto* separate_cmd = app.add_subcommand("separate", "Split one mixture into channel WAVs");
  std::string sp_model, sp_in, sp_out, sp_prefix;
  separate_cmd->add_option("--model", sp_model, "alg1 or alg3 checkpoint")->required();
  separate_cmd->add_option("--in", sp_in, "Input mixture WAV")->required()
      ->check(CLI::ExistingFile);
  separate_cmd->add_option("--out", sp_out, "Output directory")->required();
  separate_cmd->add_option("--prefix", sp_prefix, "Output name prefix (default: input stem)");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Evaluate an algorithm on a manifest split");
  std::string ev_alg, ev_model, ev_manifest, ev_out, ev_split = "test";
  std::vector<std::string> ev_aes;
  algos::LatentSearchConfig ev_cfg;
  int ev_jobs = 1;
  eval->add_option("--alg", ev_alg, "alg1, alg2 or alg3")->required()
      ->check(CLI::IsMember({"alg1", "alg2", "alg3"}));
  eval->add_option("--model", ev_model, "Trained checkpoint (alg1/alg3)");
  eval->add_option("--ae", ev_aes, "Autoencoder checkpoints (alg2; one per class)");
  eval->add_option("--manifest", ev_manifest, "Dataset manifest")->required();
  eval->add_option("--out", ev_out, "Report CSV path")->required();
  eval->add_option("--split", ev_split, "Manifest split to evaluate")->capture_default_str();
  eval->add_option("--jobs", ev_jobs, "Parallel evaluations")->capture_default_str();
  add_search_flags(eval, ev_cfg);

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "Render report CSVs as text tables");
  std::vector<std::string> rp_in;
  std::string rp_out;
  report_cmd->add_option("--in", rp_in, "Report CSV files")->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--out", rp_out, "Write tables here instead of stdout");

  // ---- demo ----
  auto* demo = app.add_subcommand("demo", "Full pipeline at demo scale");
  std::string dm_out;
  std::uint64_t dm_seed = 0;
  bool dm_seed_set = false;
  int dm_jobs = 1;
  demo->add_option("--out", dm_out, "Output directory")->required();
  demo->add_option("--seed", dm_seed, "Override the preset's master seed")
      ->each([&](const std::string&) { dm_seed_set = true; });
  demo->add_option("--jobs", dm_jobs, "Parallel jobs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run '" << argv[0] << " --help' for usage\n";
    return 2;
  }

  try {
    if (app.got_subcommand(synth)) {
      data::DatasetConfig cfg =
          synth_config.empty() ? data::DatasetConfig{} : data::load_dataset_config(synth_config);
      if (synth_seed_set) cfg.seed = synth_seed;
      print_config(data::dataset_config_to_json(cfg), cfg.seed);
      data::BuildResult result = data::build_dataset(
          cfg, synth_out, {.write_audio = true, .keep_audio = false, .jobs = synth_jobs});
      std::cout << "built " << result.records.size() << " records -> " << result.manifest_path
                << "\n";
      for (const std::string& v : data::validate_manifest(result.manifest_path)) {
        std::cerr << "warning: " << v << "\n";
      }
    } else if (app.got_subcommand(train_ae)) {
      print_config(json{{"class", ta_class},
                        {"split", ta_split},
                        {"arch", arch_json(ta_arch)},
                        {"train", train_json(ta_train)}},
                   ta_train.seed);
      const auto records = pipeline::load_split(ta_manifest, ta_split);
      const auto& ids = data::class_ids();
      const auto it = std::find(ids.begin(), ids.end(), ta_class);
      if (it == ids.end()) throw std::runtime_error("unknown class: " + ta_class);
      const auto sources =
          pipeline::class_sources(records, static_cast<std::size_t>(it - ids.begin()));
      std::cout << "training on " << sources.size() << " clips of class " << ta_class << "\n";
      std::vector<double> curve;
      algos::Autoencoder ae = algos::train_autoencoder(sources, ta_arch, ta_train, ta_class,
                                                       &curve);
      grad::save_checkpoint(ta_out, algos::to_checkpoint(ae));
      std::cout << "loss " << curve.front() << " -> " << curve.back() << "; wrote " << ta_out
                << "\n";
    } else if (app.got_subcommand(train)) {
      print_config(json{{"alg", tr_alg},
                        {"split", tr_split},
                        {"arch", arch_json(tr_arch)},
                        {"train", train_json(tr_train)}},
                   tr_train.seed);
      const auto records = pipeline::load_split(tr_manifest, tr_split);
      const auto channels = pipeline::channel_dataset(records, tr_arch.frame_len);
      std::cout << "training on " << channels.size() << " records\n";
      std::vector<double> curve;
      if (tr_alg == "alg1") {
        algos::Alg1Model model =
            algos::train_alg1(channels, data::class_ids(), tr_arch, tr_train, &curve);
        grad::save_checkpoint(tr_out, algos::to_checkpoint(model));
      } else {
        algos::SeparatorModel model =
            algos::train_separator(channels, load_aes(tr_aes), tr_arch, tr_train, &curve);
        grad::save_checkpoint(tr_out, algos::to_checkpoint(model));
      }
      std::cout << "loss " << curve.front() << " -> " << curve.back() << "; wrote " << tr_out
                << "\n";
    } else if (app.got_subcommand(search)) {
      print_config(json{{"alg", "alg2"}, {"split", se_split}, {"search", search_json(se_cfg)}},
                   se_cfg.seed);
      const auto records = pipeline::load_split(se_manifest, se_split);
      const auto decoders = pipeline::decoder_stack(load_aes(se_aes));
      fs::create_directories(se_out);
      std::vector<SearchRecordResult> results(records.size());
      std::cout << "id,best_lr,best_restart,best_loss\n";
      auto run_one = [&](std::size_t i) {
        algos::LatentSearchConfig cfg = se_cfg;
        cfg.seed = derive_seed(se_cfg.seed, i);
        const algos::LatentSearchResult r = algos::latent_search(records[i].mixture, decoders, cfg);
        for (std::size_t c = 0; c < r.outputs.size(); ++c) {
          io::write_wav(r.outputs[c], (fs::path(se_out) /
                                       (records[i].meta.id + "_" + data::class_ids()[c] + ".wav"))
                                          .string());
        }
        results[i] = {records[i].meta.id, r.best_lr, r.best_restart, r.best_loss};
      };
      if (se_jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(se_jobs)
#endif
        for (long long i = 0; i < static_cast<long long>(records.size()); ++i) {
          run_one(static_cast<std::size_t>(i));
        }
        for (const SearchRecordResult& r : results) {
          std::cout << r.id << "," << r.best_lr << "," << r.best_restart << "," << r.best_loss
                    << "\n";
        }
      } else {
        for (std::size_t i = 0; i < records.size(); ++i) {
          run_one(i);
          const SearchRecordResult& r = results[i];
          std::cout << r.id << "," << r.best_lr << "," << r.best_restart << "," << r.best_loss
                    << std::endl;
        }
      }
      std::ofstream log(fs::path(se_out) / "search_log.csv", std::ios::binary);
      log << "id,best_lr,best_restart,best_loss\n";
      for (const SearchRecordResult& r : results) {
        log << r.id << "," << r.best_lr << "," << r.best_restart << "," << r.best_loss << "\n";
      }
    } else if (app.got_subcommand(separate_cmd)) {
      const grad::Checkpoint ckpt = grad::load_checkpoint(sp_model);
      print_config(json{{"model", sp_model}, {"algorithm", ckpt.algorithm}}, 0);
      const signal::Waveform x = io::read_wav(sp_in);
      std::vector<signal::Waveform> outs;
      if (ckpt.algorithm == "alg1") {
        outs = algos::separate(algos::alg1_from_checkpoint(ckpt), x);
      } else if (ckpt.algorithm == "alg3") {
        outs = algos::separate(algos::separator_from_checkpoint(ckpt), x);
      } else {
        throw std::runtime_error("separate needs an alg1 or alg3 checkpoint, got '" +
                                 ckpt.algorithm + "'");
      }
      fs::create_directories(sp_out);
      const std::string prefix = sp_prefix.empty() ? fs::path(sp_in).stem().string() : sp_prefix;
      for (std::size_t c = 0; c < outs.size(); ++c) {
        const std::string path =
            (fs::path(sp_out) / (prefix + "_" + ckpt.channel_classes[c] + ".wav")).string();
        io::write_wav(outs[c], path);
        std::cout << "wrote " << path << "\n";
      }
    } else if (app.got_subcommand(eval)) {
      const auto records = pipeline::load_split(ev_manifest, ev_split);
      report::EvalReport rep;
      if (ev_alg == "alg2") {
        if (ev_aes.empty()) throw std::runtime_error("eval --alg alg2 needs --ae checkpoints");
        print_config(json{{"alg", ev_alg}, {"split", ev_split}, {"search", search_json(ev_cfg)}},
                     ev_cfg.seed);
        const auto decoders = pipeline::decoder_stack(load_aes(ev_aes));
        rep = pipeline::evaluate_records(
            "alg2", records,
            [&](const signal::Waveform& x, std::size_t idx) {
              algos::LatentSearchConfig cfg = ev_cfg;
              cfg.seed = derive_seed(ev_cfg.seed, idx);
              return algos::latent_search(x, decoders, cfg).outputs;
            },
            ev_jobs);
      } else {
        if (ev_model.empty()) throw std::runtime_error("eval needs --model for alg1/alg3");
        const grad::Checkpoint ckpt = grad::load_checkpoint(ev_model);
        if (ckpt.algorithm != ev_alg) {
          throw std::runtime_error("checkpoint is '" + ckpt.algorithm + "' but --alg is '" +
                                   ev_alg + "'");
        }
        print_config(json{{"alg", ev_alg}, {"split", ev_split}, {"model", ev_model}}, 0);
        if (ev_alg == "alg1") {
          const algos::Alg1Model model = algos::alg1_from_checkpoint(ckpt);
          rep = pipeline::evaluate_records(
              "alg1", records,
              [&](const signal::Waveform& x, std::size_t) { return algos::separate(model, x); },
              ev_jobs);
        } else {
          const algos::SeparatorModel model = algos::separator_from_checkpoint(ckpt);
          rep = pipeline::evaluate_records(
              "alg3", records,
              [&](const signal::Waveform& x, std::size_t) { return algos::separate(model, x); },
              ev_jobs);
        }
      }
      report::write_csv(rep, ev_out);
      std::cout << "evaluated " << records.size() << " records -> " << ev_out << "\n";
    } else if (app.got_subcommand(report_cmd)) {
      print_config(json{{"inputs", rp_in}}, 0);
      report::EvalReport merged;
      for (const std::string& p : rp_in) {
        const report::EvalReport r = report::read_csv(p);
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
      }
      const std::string tables = report::render_tables(merged);
      if (rp_out.empty()) {
        std::cout << tables;
      } else {
        std::ofstream out(rp_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + rp_out);
        out << tables;
        std::cout << "wrote " << rp_out << "\n";
      }
    } else if (app.got_subcommand(demo)) {
      pipeline::ExperimentConfig cfg = pipeline::demo_config();
      cfg.jobs = dm_jobs;
      if (dm_seed_set) {
        cfg.dataset.seed = dm_seed;
        cfg.ae_train.seed = derive_seed(dm_seed, 1);
        cfg.alg1_train.seed = derive_seed(dm_seed, 2);
        cfg.alg3_train.seed = derive_seed(dm_seed, 3);
        cfg.search.seed = derive_seed(dm_seed, 4);
      }
      print_config(json{{"dataset", data::dataset_config_to_json(cfg.dataset)},
                        {"arch", arch_json(cfg.arch)},
                        {"ae_train", train_json(cfg.ae_train)},
                        {"alg1_train", train_json(cfg.alg1_train)},
                        {"alg3_train", train_json(cfg.alg3_train)},
                        {"search", search_json(cfg.search)},
                        {"jobs", cfg.jobs}},
                   cfg.dataset.seed);
      pipeline::run_experiment(cfg, dm_out, &std::cout);
      std::cout << "demo complete; see " << (fs::path(dm_out) / "tables.txt").string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
