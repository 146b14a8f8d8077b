#include "chansep/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "chansep/metrics.hpp"

namespace chansep::report {

namespace {

struct MeanAcc {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
};

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

EvalReport evaluate_dataset(const std::string& algorithm,
                            const std::vector<RecordEval>& records,
                            const std::vector<std::string>& channel_classes) {
  const std::size_t channels = channel_classes.size();
  if (channels == 0) throw std::invalid_argument("evaluate_dataset: no channels");
  if (records.empty()) throw std::invalid_argument("evaluate_dataset: no records");

  // keyed by target count
  std::map<int, MeanAcc> t_mse, t_si, t_sdr;
  // keyed by (category, mute channel) and (category, mute channel, reference)
  std::map<std::pair<std::string, std::size_t>, MeanAcc> z_mse;
  std::map<std::tuple<std::string, std::size_t, std::size_t>, MeanAcc> z_si;
  std::map<std::string, int> category_targets;

  for (const RecordEval& r : records) {
    if (r.active.size() != channels || r.refs.size() != channels ||
        r.outputs.size() != channels) {
      throw std::invalid_argument("evaluate_dataset: record channel misalignment");
    }
    const int tc = static_cast<int>(std::count(r.active.begin(), r.active.end(), true));
    if (tc == 0) throw std::invalid_argument("evaluate_dataset: record with no active channel");
    auto [it, inserted] = category_targets.emplace(r.category, tc);
    if (!inserted && it->second != tc) {
      throw std::invalid_argument("evaluate_dataset: category '" + r.category +
                                  "' has inconsistent target counts");
    }

    std::vector<std::pair<std::string, signal::Waveform>> active_refs;
    for (std::size_t c = 0; c < channels; ++c) {
      if (r.active[c]) active_refs.emplace_back(channel_classes[c], r.refs[c]);
    }

    for (std::size_t c = 0; c < channels; ++c) {
      if (r.active[c]) {
        if (r.outputs[c].samples.size() != r.refs[c].samples.size()) {
          throw std::invalid_argument("evaluate_dataset: output/reference length mismatch");
        }
        t_mse[tc].add(metrics::mse(r.outputs[c].samples, r.refs[c].samples));
        t_si[tc].add(metrics::si_snr(r.outputs[c], r.refs[c]));
        if (tc >= 2) t_sdr[tc].add(metrics::sdr(r.outputs[c], r.refs[c]));
      } else {
        double e = 0.0;
        for (double v : r.outputs[c].samples) e += v * v;
        z_mse[{r.category, c}].add(e / static_cast<double>(r.outputs[c].samples.size()));
        for (std::size_t j = 0; j < channels; ++j) {
          if (!r.active[j]) continue;
          z_si[{r.category, c, j}].add(metrics::si_snr(r.outputs[c], r.refs[j]));
        }
      }
    }
  }

  EvalReport rep;
  for (const auto& [tc, acc] : t_mse) {
    rep.rows.push_back({algorithm, "all", tc, "all", "", "mse_s", acc.mean(), acc.n});
    const MeanAcc& si = t_si.at(tc);
    rep.rows.push_back({algorithm, "all", tc, "all", "", "si_snr_s", si.mean(), si.n});
    if (auto it = t_sdr.find(tc); it != t_sdr.end()) {
      rep.rows.push_back({algorithm, "all", tc, "all", "", "sdr", it->second.mean(),
                          it->second.n});
    }
  }

  // category order: by target count, then name — single-target blocks first
  std::vector<std::string> categories;
  for (const auto& [cat, tc] : category_targets) categories.push_back(cat);
  std::stable_sort(categories.begin(), categories.end(),
                   [&](const std::string& a, const std::string& b) {
                     return category_targets.at(a) < category_targets.at(b);
                   });

  for (const std::string& cat : categories) {
    const int tc = category_targets.at(cat);
    for (std::size_t c = 0; c < channels; ++c) {
      auto mz = z_mse.find({cat, c});
      if (mz == z_mse.end()) continue;
      rep.rows.push_back({algorithm, cat, tc, channel_classes[c], "", "mse_z",
                          mz->second.mean(), mz->second.n});
      for (std::size_t j = 0; j < channels; ++j) {
        auto sz = z_si.find({cat, c, j});
        if (sz == z_si.end()) continue;
        rep.rows.push_back({algorithm, cat, tc, channel_classes[c], channel_classes[j],
                            "si_snr_z", sz->second.mean(), sz->second.n});
      }
    }
  }
  return rep;
}

const ReportRow* maybe_find_row(const EvalReport& report, const std::string& algorithm,
                                const std::string& category, int target_count,
                                const std::string& channel, const std::string& reference_class,
                                const std::string& metric) {
  for (const ReportRow& r : report.rows) {
    if (r.algorithm == algorithm && r.category == category && r.target_count == target_count &&
        r.channel == channel && r.reference_class == reference_class && r.metric == metric) {
      return &r;
    }
  }
  return nullptr;
}

const ReportRow& find_row(const EvalReport& report, const std::string& algorithm,
                          const std::string& category, int target_count,
                          const std::string& channel, const std::string& reference_class,
                          const std::string& metric) {
  const ReportRow* r = maybe_find_row(report, algorithm, category, target_count, channel,
                                      reference_class, metric);
  if (!r) {
    throw std::runtime_error("report row not found: " + algorithm + "/" + category + "/" +
                             std::to_string(target_count) + "/" + channel + "/" +
                             reference_class + "/" + metric);
  }
  return *r;
}

std::string to_csv(const EvalReport& report) {
  std::string out = "algorithm,category,target_count,channel,reference_class,metric,value,n\n";
  for (const ReportRow& r : report.rows) {
    out += r.algorithm + ',' + r.category + ',' + std::to_string(r.target_count) + ',' +
           r.channel + ',' + r.reference_class + ',' + r.metric + ',' + format_value(r.value) +
           ',' + std::to_string(r.n) + '\n';
  }
  return out;
}

EvalReport from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty report CSV");
  if (line != "algorithm,category,target_count,channel,reference_class,metric,value,n") {
    throw std::runtime_error("unrecognized report CSV header");
  }
  EvalReport rep;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 8) throw std::runtime_error("malformed report CSV row: " + line);
    ReportRow r;
    r.algorithm = fields[0];
    r.category = fields[1];
    r.target_count = std::stoi(fields[2]);
    r.channel = fields[3];
    r.reference_class = fields[4];
    r.metric = fields[5];
    r.value = std::stod(fields[6]);
    r.n = static_cast<std::size_t>(std::stoull(fields[7]));
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

void write_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report for writing: " + path);
  out << to_csv(report);
  if (!out) throw std::runtime_error("failed writing report: " + path);
}

EvalReport read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

namespace {

std::string fmt_db(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%8.2f", v);
  return buf;
}

std::string fmt_mse(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%10.2E", v);
  return buf;
}

}  // namespace

std::string render_tables(const EvalReport& report) {
  std::vector<std::string> algos;
  for (const ReportRow& r : report.rows) {
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) {
      algos.push_back(r.algorithm);
    }
  }

  std::ostringstream out;
  out << "Target-channel quality (active channels, pooled by target count)\n";
  out << "  algorithm  targets        MSE_s  SI-SNR_s[dB]    SDR[dB]      n\n";
  for (const std::string& alg : algos) {
    double w_mse = 0.0, w_si = 0.0;
    std::size_t n_tot = 0;
    for (const ReportRow& r : report.rows) {
      if (r.algorithm != alg || r.category != "all" || r.metric != "mse_s") continue;
      const ReportRow& si = find_row(report, alg, "all", r.target_count, "all", "", "si_snr_s");
      const ReportRow* sd = maybe_find_row(report, alg, "all", r.target_count, "all", "", "sdr");
      out << "  " << alg << std::string(alg.size() < 9 ? 9 - alg.size() : 1, ' ')
          << "  " << r.target_count << "      " << fmt_mse(r.value) << "      "
          << fmt_db(si.value) << "   " << (sd ? fmt_db(sd->value) : "       -") << "  "
          << r.n << "\n";
      w_mse += r.value * static_cast<double>(r.n);
      w_si += si.value * static_cast<double>(r.n);
      n_tot += r.n;
    }
    if (n_tot > 0) {
      out << "  " << alg << std::string(alg.size() < 9 ? 9 - alg.size() : 1, ' ')
          << "  aver   " << fmt_mse(w_mse / static_cast<double>(n_tot)) << "      "
          << fmt_db(w_si / static_cast<double>(n_tot)) << "          -  " << n_tot << "\n";
    }
  }

  out << "\nMute-channel leakage, single-target inputs\n";
  out << "  algorithm  input  mute  reference  SI-SNR_z[dB]       MSE_z      n\n";
  for (const std::string& alg : algos) {
    for (const ReportRow& r : report.rows) {
      if (r.algorithm != alg || r.metric != "si_snr_z" || r.target_count != 1) continue;
      const ReportRow& mz = find_row(report, alg, r.category, 1, r.channel, "", "mse_z");
      out << "  " << alg << std::string(alg.size() < 9 ? 9 - alg.size() : 1, ' ') << "  "
          << r.category << "      " << r.channel << "     " << r.reference_class << "          "
          << fmt_db(r.value) << "  " << fmt_mse(mz.value) << "  " << r.n << "\n";
    }
  }

  out << "\nMute-channel leakage, multi-target inputs\n";
  out << "  algorithm  category  mute  reference  SI-SNR_z[dB]       MSE_z      n\n";
  for (const std::string& alg : algos) {
    for (const ReportRow& r : report.rows) {
      if (r.algorithm != alg || r.metric != "si_snr_z" || r.target_count < 2) continue;
      const ReportRow& mz =
          find_row(report, alg, r.category, r.target_count, r.channel, "", "mse_z");
      out << "  " << alg << std::string(alg.size() < 9 ? 9 - alg.size() : 1, ' ') << "  "
          << r.category << std::string(r.category.size() < 8 ? 8 - r.category.size() : 1, ' ')
          << "  " << r.channel << "     " << r.reference_class << "          " << fmt_db(r.value)
          << "  " << fmt_mse(mz.value) << "  " << r.n << "\n";
    }
  }
  return out.str();
}

}  // namespace chansep::report
