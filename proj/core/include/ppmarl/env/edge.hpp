#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppmarl/env/environment.hpp"
#include "ppmarl/env/traces.hpp"
#include "ppmarl/env/vec2.hpp"

namespace ppmarl {

// How vehicle->controller assignment is resolved each step.
//   actions: per-controller preference scores over a spatial grid; each
//            covered vehicle goes to the covering controller with the highest
//            score for the vehicle's cell (ties to the lowest index).
//   distance_greedy: nearest covering controller (DB baseline).
//   cloud: nearest covering controller plus a fixed cloud round-trip (RC).
enum class EdgeAssignMode { actions, distance_greedy, cloud };

struct EdgeConfig {
  double arena_w = 10000.0;  // meters
  double arena_h = 10000.0;
  int n_controllers = 4;
  std::vector<Vec2> bs_positions;  // empty -> default layout
  double coverage_radius = 4000.0;

  // Response delay model: propagation + base processing + an M/M/1-style
  // load term 1/(mu - lambda) capped at max_queue_delay. All config-exposed.
  double propagation_speed = 2e8;        // m/s
  double base_processing_delay = 0.005;  // s
  double service_rate = 4.0;             // requests/s per controller (mu)
  double demand_per_vehicle = 0.02;      // requests/s per assigned vehicle
  double max_queue_delay = 2.0;          // s, saturation cap
  double unserved_penalty_delay = 5.0;   // s, vehicle outside all coverage
  double cloud_extra_delay = 0.05;       // s, RC baseline addend

  int grid_cells = 4;          // preference/observation grid is grid_cells^2
  double obs_count_norm = 25;  // vehicles per cell treated as "full"
  double step_seconds = 600.0;
  double episode_hours = 24.0;

  std::string trace_mode = "synth";  // synth | file
  SynthTraceConfig synth;
  std::string trace_file;
  TraceCsvSchema trace_schema;

  void validate() const;
  std::vector<Vec2> resolved_bs_positions() const;
  int obs_dim() const { return grid_cells * grid_cells + 1; }
  int action_dim() const { return grid_cells * grid_cells; }
  int steps() const { return static_cast<int>(episode_hours * 3600.0 / step_seconds); }
};

// Everything the delay oracle needs to recheck one step.
struct EdgeStepDetail {
  std::vector<Vec2> vehicle_positions;
  std::vector<int> assignment;  // controller index or -1 = unserved
  std::vector<double> delays;   // per vehicle, seconds
  std::vector<int> loads;       // per controller
  int unserved = 0;
  double sim_time = 0.0;
};

class EdgeEnv final : public MultiAgentEnv {
 public:
  explicit EdgeEnv(EdgeConfig cfg, EdgeAssignMode mode = EdgeAssignMode::actions);

  int n_agents() const override { return cfg_.n_controllers; }
  int obs_dim() const override { return cfg_.obs_dim(); }
  int action_dim() const override { return cfg_.action_dim(); }
  int steps_per_episode() const override { return cfg_.steps(); }

  std::vector<Vec> reset(std::uint64_t seed) override;
  StepResult step(const std::vector<Vec>& actions) override;

  std::string metric_name() const override { return "mean_delay"; }
  Vec state_summary() const override;

  const EdgeStepDetail& last_detail() const { return detail_; }
  const EdgeConfig& config() const { return cfg_; }
  EdgeAssignMode assign_mode() const { return mode_; }

  // Test hook: run with explicit vehicle positions instead of traces.
  void set_fixed_vehicles(std::vector<Vec2> positions);

  int cell_of(const Vec2& p) const;

 private:
  std::vector<Vec2> vehicle_positions_at(double t) const;
  std::vector<Vec> observations(const std::vector<Vec2>& vehicles) const;
  void resolve_step(const std::vector<Vec2>& vehicles, const std::vector<Vec>& actions,
                    EdgeStepDetail& detail) const;

  EdgeConfig cfg_;
  EdgeAssignMode mode_;
  std::vector<Vec2> bs_;
  std::vector<VehicleTrace> traces_;
  std::vector<Vec2> fixed_vehicles_;
  bool use_fixed_vehicles_ = false;
  int step_index_ = 0;
  std::vector<int> prev_loads_;
  EdgeStepDetail detail_;
};

}  // namespace ppmarl
