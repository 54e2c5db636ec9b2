#pragma once

#include <map>
#include <string>
#include <vector>

#include "ppmarl/marl/bus.hpp"

namespace ppmarl {

class ComparisonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-run overhead totals. Byte totals come from canonical serialization on
// the bus; interaction rounds count mid-network HE activation roundtrips;
// the delay proxy is deterministic (bytes / link rate + per-message latency),
// wall clock is reported separately and never compared.
struct OverheadReport {
  std::string scheme;
  std::uint64_t config_hash = 0;
  std::map<std::string, KindStats> per_kind;
  std::uint64_t total_bytes = 0;
  std::uint64_t total_messages = 0;
  std::uint64_t interaction_rounds = 0;
  OpCounters ops;
  std::uint64_t train_iterations = 0;
  std::uint64_t env_steps = 0;
  double wall_seconds = 0.0;

  double bytes_per_iteration() const;
  double megabytes_total() const { return static_cast<double>(total_bytes) / 1e6; }
  // link_bps: serialized bits per second; per_msg_latency_s added per message.
  double delay_proxy_s(double link_bps, double per_msg_latency_s) const;
};

OverheadReport account(const MessageBus& bus, const std::string& scheme,
                       std::uint64_t config_hash, std::uint64_t train_iterations,
                       std::uint64_t env_steps, double wall_seconds);

std::string overhead_report_json(const OverheadReport& r);
OverheadReport overhead_report_from_json(const std::string& text);

// One row per scheme, byte ratios relative to the first report. Throws
// ComparisonError when config hashes differ.
struct OverheadComparison {
  std::vector<OverheadReport> reports;
  std::vector<double> byte_ratio_vs_first;
  std::vector<double> compute_ratio_vs_first;
};

OverheadComparison compare_overheads(const std::vector<OverheadReport>& reports);

// CSV emitters (plot-ready, column names follow the index comparison table).
std::string overhead_table_csv(const OverheadComparison& cmp, double link_bps,
                               double per_msg_latency_s);

}  // namespace ppmarl
