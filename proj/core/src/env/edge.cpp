#include "ppmarl/env/edge.hpp"

#include <algorithm>
#include <cmath>

#include "ppmarl/common.hpp"

namespace ppmarl {

void EdgeConfig::validate() const {
  if (arena_w <= 0 || arena_h <= 0) throw ConfigError("edge: arena dimensions must be positive");
  if (n_controllers < 1) throw ConfigError("edge: need at least one controller");
  if (!bs_positions.empty() && static_cast<int>(bs_positions.size()) != n_controllers) {
    throw ConfigError("edge: bs_positions size must match n_controllers");
  }
  if (coverage_radius <= 0) throw ConfigError("edge: coverage_radius must be positive");
  if (service_rate <= 0) throw ConfigError("edge: service_rate must be positive");
  if (demand_per_vehicle < 0) throw ConfigError("edge: demand_per_vehicle must be >= 0");
  if (grid_cells < 1) throw ConfigError("edge: grid_cells must be >= 1");
  if (step_seconds <= 0 || episode_hours <= 0) throw ConfigError("edge: invalid step/episode");
  if (steps() < 1) throw ConfigError("edge: episode shorter than one step");
  if (trace_mode != "synth" && trace_mode != "file") {
    throw ConfigError("edge: trace_mode must be synth or file");
  }
  if (trace_mode == "file" && trace_file.empty()) {
    throw ConfigError("edge: trace_mode=file requires trace_file");
  }
}

std::vector<Vec2> EdgeConfig::resolved_bs_positions() const {
  if (!bs_positions.empty()) return bs_positions;
  if (n_controllers == 4) {
    return {{arena_w * 0.25, arena_h * 0.25},
            {arena_w * 0.75, arena_h * 0.25},
            {arena_w * 0.25, arena_h * 0.75},
            {arena_w * 0.75, arena_h * 0.75}};
  }
  // Ring layout for other controller counts.
  std::vector<Vec2> out;
  const double r = 0.3 * std::min(arena_w, arena_h);
  for (int i = 0; i < n_controllers; ++i) {
    const double ang = 2.0 * M_PI * i / n_controllers;
    out.push_back({arena_w / 2 + r * std::cos(ang), arena_h / 2 + r * std::sin(ang)});
  }
  return out;
}

EdgeEnv::EdgeEnv(EdgeConfig cfg, EdgeAssignMode mode) : cfg_(std::move(cfg)), mode_(mode) {
  cfg_.validate();
  bs_ = cfg_.resolved_bs_positions();
  prev_loads_.assign(cfg_.n_controllers, 0);
  if (cfg_.trace_mode == "file") {
    auto result = ingest_traces(cfg_.trace_file, cfg_.trace_schema, cfg_.arena_w, cfg_.arena_h);
    traces_ = std::move(result.traces);
  }
}

void EdgeEnv::set_fixed_vehicles(std::vector<Vec2> positions) {
  fixed_vehicles_ = std::move(positions);
  use_fixed_vehicles_ = true;
}

int EdgeEnv::cell_of(const Vec2& p) const {
  const int g = cfg_.grid_cells;
  int cx = static_cast<int>(p.x / cfg_.arena_w * g);
  int cy = static_cast<int>(p.y / cfg_.arena_h * g);
  cx = std::clamp(cx, 0, g - 1);
  cy = std::clamp(cy, 0, g - 1);
  return cy * g + cx;
}

std::vector<Vec2> EdgeEnv::vehicle_positions_at(double t) const {
  if (use_fixed_vehicles_) return fixed_vehicles_;
  std::vector<Vec2> out;
  out.reserve(traces_.size());
  for (const auto& trace : traces_) out.push_back(trace.position_at(t));
  return out;
}

std::vector<Vec> EdgeEnv::reset(std::uint64_t seed) {
  if (cfg_.trace_mode == "synth" && !use_fixed_vehicles_) {
    traces_ = synth_traces(cfg_.synth, cfg_.arena_w, cfg_.arena_h, seed);
  }
  step_index_ = 0;
  prev_loads_.assign(cfg_.n_controllers, 0);
  return observations(vehicle_positions_at(0.5 * cfg_.step_seconds));
}

std::vector<Vec> EdgeEnv::observations(const std::vector<Vec2>& vehicles) const {
  const int g2 = cfg_.grid_cells * cfg_.grid_cells;
  std::vector<Vec> obs(cfg_.n_controllers, Vec(cfg_.obs_dim(), 0.0));
  for (const auto& v : vehicles) {
    const int cell = cell_of(v);
    for (int c = 0; c < cfg_.n_controllers; ++c) {
      if (distance(v, bs_[c]) <= cfg_.coverage_radius) obs[c][cell] += 1.0;
    }
  }
  for (int c = 0; c < cfg_.n_controllers; ++c) {
    for (int k = 0; k < g2; ++k) obs[c][k] = std::min(obs[c][k] / cfg_.obs_count_norm, 1.0);
    obs[c][g2] = std::min(prev_loads_[c] * cfg_.demand_per_vehicle / cfg_.service_rate, 1.0);
  }
  return obs;
}

void EdgeEnv::resolve_step(const std::vector<Vec2>& vehicles, const std::vector<Vec>& actions,
                           EdgeStepDetail& detail) const {
  const std::size_t n_veh = vehicles.size();
  detail.vehicle_positions = vehicles;
  detail.assignment.assign(n_veh, -1);
  detail.delays.assign(n_veh, 0.0);
  detail.loads.assign(cfg_.n_controllers, 0);
  detail.unserved = 0;

  for (std::size_t v = 0; v < n_veh; ++v) {
    int best = -1;
    double best_score = 0.0;
    for (int c = 0; c < cfg_.n_controllers; ++c) {
      const double d = distance(vehicles[v], bs_[c]);
      if (d > cfg_.coverage_radius) continue;
      double score = 0.0;
      switch (mode_) {
        case EdgeAssignMode::actions:
          score = actions[c][cell_of(vehicles[v])];
          break;
        case EdgeAssignMode::distance_greedy:
        case EdgeAssignMode::cloud:
          score = -d;
          break;
      }
      if (best < 0 || score > best_score) {
        best = c;
        best_score = score;
      }
    }
    detail.assignment[v] = best;
    if (best < 0) {
      ++detail.unserved;
    } else {
      ++detail.loads[best];
    }
  }

  std::vector<double> queue_delay(cfg_.n_controllers, 0.0);
  for (int c = 0; c < cfg_.n_controllers; ++c) {
    const double lambda = detail.loads[c] * cfg_.demand_per_vehicle;
    if (lambda >= cfg_.service_rate) {
      queue_delay[c] = cfg_.max_queue_delay;
    } else {
      queue_delay[c] = std::min(1.0 / (cfg_.service_rate - lambda), cfg_.max_queue_delay);
    }
  }
  for (std::size_t v = 0; v < n_veh; ++v) {
    const int c = detail.assignment[v];
    if (c < 0) {
      detail.delays[v] = cfg_.unserved_penalty_delay;
      continue;
    }
    double d = distance(vehicles[v], bs_[c]) / cfg_.propagation_speed +
               cfg_.base_processing_delay + queue_delay[c];
    if (mode_ == EdgeAssignMode::cloud) d += cfg_.cloud_extra_delay;
    detail.delays[v] = d;
  }
}

MultiAgentEnv::StepResult EdgeEnv::step(const std::vector<Vec>& actions) {
  if (static_cast<int>(actions.size()) != cfg_.n_controllers) {
    throw UsageError("edge: one action per controller required");
  }
  for (const auto& a : actions) {
    if (static_cast<int>(a.size()) != cfg_.action_dim()) {
      throw UsageError("edge: action dimension mismatch");
    }
  }
  if (step_index_ >= steps_per_episode()) {
    throw UsageError("edge: episode already finished; call reset");
  }

  const double t = (step_index_ + 0.5) * cfg_.step_seconds;
  const auto vehicles = vehicle_positions_at(t);
  resolve_step(vehicles, actions, detail_);
  detail_.sim_time = t;
  prev_loads_ = detail_.loads;
  ++step_index_;

  double mean_delay = 0.0;
  if (!detail_.delays.empty()) {
    for (double d : detail_.delays) mean_delay += d;
    mean_delay /= static_cast<double>(detail_.delays.size());
  }

  StepResult r;
  r.reward = -mean_delay;
  r.metric = mean_delay;
  r.done = step_index_ >= steps_per_episode();
  const double t_next = (step_index_ + 0.5) * cfg_.step_seconds;
  r.obs = observations(r.done ? vehicles : vehicle_positions_at(t_next));
  return r;
}

Vec EdgeEnv::state_summary() const {
  Vec s;
  s.reserve(cfg_.n_controllers + 2);
  for (int load : detail_.loads) s.push_back(static_cast<double>(load));
  s.push_back(static_cast<double>(detail_.unserved));
  s.push_back(detail_.sim_time);
  return s;
}

}  // namespace ppmarl
