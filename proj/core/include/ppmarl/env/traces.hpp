#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ppmarl/env/vec2.hpp"
#include "ppmarl/rng.hpp"

namespace ppmarl {

struct TracePoint {
  double t = 0.0;  // seconds since trace start
  Vec2 pos;
};

struct VehicleTrace {
  std::string vehicle_id;
  std::vector<TracePoint> points;  // timestamps strictly increasing

  // Piecewise-linear position; clamps to the first/last point outside range.
  Vec2 position_at(double t) const;
};

// CSV schema: header row, comma separated, UTF-8. Columns are matched by
// name. Either (x, y) in meters or (lat, lon) projected into the arena
// bounding box.
struct TraceCsvSchema {
  std::string id_col = "vehicle_id";
  std::string t_col = "timestamp";
  std::string x_col = "x";
  std::string y_col = "y";
  bool lat_lon = false;  // when true, x_col/y_col name the lon/lat columns
};

struct IngestResult {
  std::vector<VehicleTrace> traces;  // sorted by vehicle id; points by time
  std::size_t skipped_rows = 0;
};

// Reads, sorts, deduplicates (same vehicle+timestamp) and, for lat/lon input,
// projects into [0,arena_w]x[0,arena_h]. Malformed rows are counted and
// skipped. Throws IoError if unreadable, DataError if no valid rows remain.
IngestResult ingest_traces(const std::filesystem::path& path, const TraceCsvSchema& schema,
                           double arena_w, double arena_h);

void write_traces_csv(const std::filesystem::path& path, const std::vector<VehicleTrace>& traces,
                      const TraceCsvSchema& schema);

// Random-waypoint mobility with an optional time-varying hotspot: during rush
// hours waypoints are drawn near `hotspot` with probability
// rush_hotspot_prob (base_hotspot_prob otherwise), producing the daily load
// imbalance seen in urban traffic.
struct SynthTraceConfig {
  int n_vehicles = 200;
  double duration_s = 24.0 * 3600.0;
  double min_speed = 5.0;   // m/s
  double max_speed = 15.0;  // m/s
  Vec2 hotspot{4300.0, 4300.0};
  double hotspot_sigma = 800.0;
  std::vector<std::pair<int, int>> rush_hours{{7, 10}, {17, 19}};  // [start, end) hours
  double rush_hotspot_prob = 0.85;
  double base_hotspot_prob = 0.10;
};

std::vector<VehicleTrace> synth_traces(const SynthTraceConfig& cfg, double arena_w, double arena_h,
                                       std::uint64_t seed);

bool in_rush_hours(const SynthTraceConfig& cfg, double t_seconds);

}  // namespace ppmarl
