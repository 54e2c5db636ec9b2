#pragma once

#include <cstdint>
#include <vector>

#include "ppmarl/env/environment.hpp"
#include "ppmarl/env/vec2.hpp"
#include "ppmarl/rng.hpp"

namespace ppmarl {

struct DroneConfig {
  double arena_w = 1000.0;  // meters
  double arena_h = 1000.0;
  int n_drones = 3;
  int n_targets = 3;
  double target_radius = 40.0;
  double coverage_radius = 50.0;
  int steps_per_episode = 10;
  double obs_range = 500.0;  // presets: low 250 / medium 500 / high 1500
  double collision_distance = 5.0;
  double collision_penalty = 1.0;
  double max_speed = 100.0;  // meters per step
  // false: a target counts as covered when its center is within
  // coverage_radius of some drone. true: the whole target disc must fit
  // (distance <= coverage_radius - target_radius).
  bool full_disc_coverage = false;

  void validate() const;
  int obs_dim() const;  // 2 + 3*(n_drones-1) + 3*n_targets
};

double obs_range_preset(const std::string& name);  // low/medium/high

struct DroneState {
  std::vector<Vec2> drones;
  std::vector<Vec2> targets;
  int step_index = 0;
};

class DroneEnv final : public MultiAgentEnv {
 public:
  explicit DroneEnv(DroneConfig cfg);

  int n_agents() const override { return cfg_.n_drones; }
  int obs_dim() const override { return cfg_.obs_dim(); }
  int action_dim() const override { return 2; }
  int steps_per_episode() const override { return cfg_.steps_per_episode; }

  std::vector<Vec> reset(std::uint64_t seed) override;
  StepResult step(const std::vector<Vec>& actions) override;

  std::string metric_name() const override { return "coverage"; }
  Vec state_summary() const override;

  // Observation layout: own position scaled to [0,1]^2, then one slot per
  // other drone and per target: (dx/obs_range, dy/obs_range, visible flag).
  // Out-of-range slots are zero with flag 0; range boundaries are closed.
  Vec observe(int agent) const;

  int coverage_count() const;
  int collision_pairs() const;

  const DroneState& state() const { return st_; }
  void set_state(const DroneState& st) { st_ = st; }  // test hook
  const DroneConfig& config() const { return cfg_; }

 private:
  DroneConfig cfg_;
  DroneState st_;
};

int coverage_count(const DroneState& st, const DroneConfig& cfg);
int collision_pairs(const DroneState& st, const DroneConfig& cfg);

}  // namespace ppmarl
