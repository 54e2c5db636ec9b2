#include "ppmarl/env/traces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ppmarl/common.hpp"

namespace ppmarl {

Vec2 VehicleTrace::position_at(double t) const {
  if (points.empty()) return {0.0, 0.0};
  if (t <= points.front().t) return points.front().pos;
  if (t >= points.back().t) return points.back().pos;
  // Binary search for the segment containing t.
  std::size_t lo = 0, hi = points.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (points[mid].t <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const TracePoint& a = points[lo];
  const TracePoint& b = points[hi];
  const double w = (t - a.t) / (b.t - a.t);
  return {a.pos.x + w * (b.pos.x - a.pos.x), a.pos.y + w * (b.pos.y - a.pos.y)};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc()) return false;
  while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  return ptr == end && std::isfinite(out);
}

}  // namespace

IngestResult ingest_traces(const std::filesystem::path& path, const TraceCsvSchema& schema,
                           double arena_w, double arena_h) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path.string());

  std::string header;
  if (!std::getline(in, header)) throw DataError("trace file is empty: " + path.string());
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto cols = split_csv_line(header);
  auto col_index = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int id_i = col_index(schema.id_col);
  const int t_i = col_index(schema.t_col);
  const int x_i = col_index(schema.x_col);
  const int y_i = col_index(schema.y_col);
  if (id_i < 0 || t_i < 0 || x_i < 0 || y_i < 0) {
    throw DataError("trace file missing required columns: " + path.string());
  }

  std::map<std::string, std::map<double, Vec2>> by_vehicle;  // dedup on (id, t)
  std::size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const int needed = std::max({id_i, t_i, x_i, y_i});
    double t, x, y;
    if (static_cast<int>(cells.size()) <= needed || cells[id_i].empty() ||
        !parse_double(cells[t_i], t) || !parse_double(cells[x_i], x) ||
        !parse_double(cells[y_i], y)) {
      ++skipped;
      continue;
    }
    by_vehicle[cells[id_i]][t] = {x, y};
  }
  if (by_vehicle.empty()) throw DataError("trace file has no valid rows: " + path.string());

  IngestResult result;
  result.skipped_rows = skipped;

  if (schema.lat_lon) {
    // Equirectangular projection of the data bounding box onto the arena.
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = std::numeric_limits<double>::infinity(), max_y = -min_y;
    for (const auto& [id, pts] : by_vehicle) {
      for (const auto& [t, p] : pts) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
      }
    }
    const double span_x = std::max(max_x - min_x, 1e-12);
    const double span_y = std::max(max_y - min_y, 1e-12);
    for (auto& [id, pts] : by_vehicle) {
      for (auto& [t, p] : pts) {
        p = {(p.x - min_x) / span_x * arena_w, (p.y - min_y) / span_y * arena_h};
      }
    }
  } else {
    for (auto& [id, pts] : by_vehicle) {
      for (auto& [t, p] : pts) {
        p = {clamp(p.x, 0.0, arena_w), clamp(p.y, 0.0, arena_h)};
      }
    }
  }

  for (auto& [id, pts] : by_vehicle) {
    VehicleTrace trace;
    trace.vehicle_id = id;
    trace.points.reserve(pts.size());
    for (const auto& [t, p] : pts) trace.points.push_back({t, p});
    result.traces.push_back(std::move(trace));
  }
  return result;
}

void write_traces_csv(const std::filesystem::path& path, const std::vector<VehicleTrace>& traces,
                      const TraceCsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trace file for writing: " + path.string());
  out << schema.id_col << ',' << schema.t_col << ',' << schema.x_col << ',' << schema.y_col
      << '\n';
  out.precision(17);
  for (const auto& trace : traces) {
    for (const auto& p : trace.points) {
      out << trace.vehicle_id << ',' << p.t << ',' << p.pos.x << ',' << p.pos.y << '\n';
    }
  }
}

bool in_rush_hours(const SynthTraceConfig& cfg, double t_seconds) {
  const double hour = std::fmod(t_seconds / 3600.0, 24.0);
  for (const auto& [start, end] : cfg.rush_hours) {
    if (hour >= start && hour < end) return true;
  }
  return false;
}

std::vector<VehicleTrace> synth_traces(const SynthTraceConfig& cfg, double arena_w, double arena_h,
                                       std::uint64_t seed) {
  if (cfg.n_vehicles < 1) throw ConfigError("synth_traces: n_vehicles must be >= 1");
  if (!(cfg.max_speed >= cfg.min_speed && cfg.min_speed > 0)) {
    throw ConfigError("synth_traces: speeds must satisfy 0 < min <= max");
  }

  std::vector<VehicleTrace> traces;
  traces.reserve(cfg.n_vehicles);
  for (int v = 0; v < cfg.n_vehicles; ++v) {
    Rng rng(derive_seed(seed, "synth-vehicle", static_cast<std::uint64_t>(v)));
    VehicleTrace trace;
    trace.vehicle_id = "veh" + std::to_string(v);

    Vec2 pos{rng.uniform(0.0, arena_w), rng.uniform(0.0, arena_h)};
    double t = 0.0;
    trace.points.push_back({t, pos});
    while (t < cfg.duration_s) {
      const double p_hot = in_rush_hours(cfg, t) ? cfg.rush_hotspot_prob : cfg.base_hotspot_prob;
      Vec2 waypoint;
      if (rng.uniform() < p_hot) {
        waypoint = {clamp(cfg.hotspot.x + rng.gaussian(0.0, cfg.hotspot_sigma), 0.0, arena_w),
                    clamp(cfg.hotspot.y + rng.gaussian(0.0, cfg.hotspot_sigma), 0.0, arena_h)};
      } else {
        waypoint = {rng.uniform(0.0, arena_w), rng.uniform(0.0, arena_h)};
      }
      const double speed = rng.uniform(cfg.min_speed, cfg.max_speed);
      const double dist = distance(pos, waypoint);
      const double dt = std::max(dist / speed, 1.0);
      t += dt;
      pos = waypoint;
      trace.points.push_back({t, pos});
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace ppmarl
