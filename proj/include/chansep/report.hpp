#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chansep/waveform.hpp"

namespace chansep::report {

// Channel-aligned view of one separated record: refs[i] is class i's clean
// target for active channels and is ignored for mute ones.
struct RecordEval {
  std::string category;                    // e.g. "B", "BC", "BCD"
  std::vector<bool> active;                // per channel
  std::vector<signal::Waveform> refs;      // per channel
  std::vector<signal::Waveform> outputs;   // per channel
};

// One aggregation cell. Pooled target-channel rows use category="all",
// channel="all". reference_class is set only for si_snr_z rows.
struct ReportRow {
  std::string algorithm;
  std::string category;
  int target_count = 0;
  std::string channel;
  std::string reference_class;
  std::string metric;  // mse_s | si_snr_s | sdr | mse_z | si_snr_z
  double value = 0.0;
  std::size_t n = 0;   // channel instances averaged into this cell
};

struct EvalReport {
  std::vector<ReportRow> rows;
};

// Aggregates per-record channel evaluations into the report cells:
//   - per target count (pooled over categories): mean mse_s / si_snr_s over
//     active channel instances, plus sdr for >= 2 targets;
//   - per (category, mute channel): mean mse_z, and mean si_snr_z per active
//     reference class.
// Every (record, channel) instance lands in exactly one cell per metric.
// Throws on mask/output misalignment.
EvalReport evaluate_dataset(const std::string& algorithm,
                            const std::vector<RecordEval>& records,
                            const std::vector<std::string>& channel_classes);

// Convenience lookup; throws if the row is absent.
const ReportRow& find_row(const EvalReport& report, const std::string& algorithm,
                          const std::string& category, int target_count,
                          const std::string& channel, const std::string& reference_class,
                          const std::string& metric);
const ReportRow* maybe_find_row(const EvalReport& report, const std::string& algorithm,
                                const std::string& category, int target_count,
                                const std::string& channel, const std::string& reference_class,
                                const std::string& metric);

// CSV round trip. Header: algorithm,category,target_count,channel,
// reference_class,metric,value,n. Values print with %.17g so a read-back
// report is value-identical.
std::string to_csv(const EvalReport& report);
EvalReport from_csv(const std::string& csv);
void write_csv(const EvalReport& report, const std::string& path);
EvalReport read_csv(const std::string& path);

// Human-readable tables: target-channel quality by target count, then
// mute-channel leakage for single- and multi-target inputs. dB cells print
// as %.2f, MSE cells as %.2E.
std::string render_tables(const EvalReport& report);

}  // namespace chansep::report
