#include "ppmarl/env/drone.hpp"

#include <string>

namespace ppmarl {

void DroneConfig::validate() const {
  if (arena_w <= 0 || arena_h <= 0) throw ConfigError("drone: arena dimensions must be positive");
  if (n_drones < 1 || n_targets < 1) throw ConfigError("drone: need at least one drone and target");
  if (coverage_radius < 0) throw ConfigError("drone: coverage_radius must be >= 0");
  if (target_radius < 0) throw ConfigError("drone: target_radius must be >= 0");
  if (steps_per_episode < 1) throw ConfigError("drone: steps_per_episode must be >= 1");
  if (obs_range <= 0) throw ConfigError("drone: obs_range must be positive");
  if (max_speed <= 0) throw ConfigError("drone: max_speed must be positive");
  if (collision_distance < 0) throw ConfigError("drone: collision_distance must be >= 0");
}

int DroneConfig::obs_dim() const { return 2 + 3 * (n_drones - 1) + 3 * n_targets; }

double obs_range_preset(const std::string& name) {
  if (name == "low") return 250.0;
  if (name == "medium") return 500.0;
  if (name == "high") return 1500.0;
  throw ConfigError("unknown obs_range preset: " + name);
}

DroneEnv::DroneEnv(DroneConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<Vec> DroneEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  st_.drones.resize(cfg_.n_drones);
  st_.targets.resize(cfg_.n_targets);
  for (auto& d : st_.drones) d = {rng.uniform(0.0, cfg_.arena_w), rng.uniform(0.0, cfg_.arena_h)};
  for (auto& t : st_.targets) t = {rng.uniform(0.0, cfg_.arena_w), rng.uniform(0.0, cfg_.arena_h)};
  st_.step_index = 0;

  std::vector<Vec> obs(cfg_.n_drones);
  for (int i = 0; i < cfg_.n_drones; ++i) obs[i] = observe(i);
  return obs;
}

Vec DroneEnv::observe(int agent) const {
  if (agent < 0 || agent >= cfg_.n_drones) throw UsageError("drone: bad agent index");
  Vec out;
  out.reserve(cfg_.obs_dim());
  const Vec2 own = st_.drones[agent];
  out.push_back(own.x / cfg_.arena_w);
  out.push_back(own.y / cfg_.arena_h);
  auto push_slot = [&](const Vec2& p) {
    if (distance(own, p) <= cfg_.obs_range) {
      out.push_back((p.x - own.x) / cfg_.obs_range);
      out.push_back((p.y - own.y) / cfg_.obs_range);
      out.push_back(1.0);
    } else {
      out.push_back(0.0);
      out.push_back(0.0);
      out.push_back(0.0);
    }
  };
  for (int j = 0; j < cfg_.n_drones; ++j) {
    if (j != agent) push_slot(st_.drones[j]);
  }
  for (const auto& t : st_.targets) push_slot(t);
  return out;
}

MultiAgentEnv::StepResult DroneEnv::step(const std::vector<Vec>& actions) {
  if (static_cast<int>(actions.size()) != cfg_.n_drones) {
    throw UsageError("drone: one action per drone required");
  }
  if (st_.step_index >= cfg_.steps_per_episode) {
    throw UsageError("drone: episode already finished; call reset");
  }
  for (int i = 0; i < cfg_.n_drones; ++i) {
    if (actions[i].size() != 2) throw UsageError("drone: actions must have dimension 2");
    const double ax = clamp(actions[i][0], -1.0, 1.0);
    const double ay = clamp(actions[i][1], -1.0, 1.0);
    Vec2& p = st_.drones[i];
    p.x = clamp(p.x + ax * cfg_.max_speed, 0.0, cfg_.arena_w);
    p.y = clamp(p.y + ay * cfg_.max_speed, 0.0, cfg_.arena_h);
  }
  ++st_.step_index;

  StepResult r;
  const int covered = coverage_count();
  const int collisions = collision_pairs();
  r.reward = static_cast<double>(covered) - cfg_.collision_penalty * collisions;
  r.metric = static_cast<double>(covered);
  r.done = st_.step_index >= cfg_.steps_per_episode;
  r.obs.resize(cfg_.n_drones);
  for (int i = 0; i < cfg_.n_drones; ++i) r.obs[i] = observe(i);
  return r;
}

int coverage_count(const DroneState& st, const DroneConfig& cfg) {
  const double limit =
      cfg.full_disc_coverage ? cfg.coverage_radius - cfg.target_radius : cfg.coverage_radius;
  int covered = 0;
  for (const auto& t : st.targets) {
    for (const auto& d : st.drones) {
      if (distance(t, d) <= limit) {
        ++covered;
        break;
      }
    }
  }
  return covered;
}

int collision_pairs(const DroneState& st, const DroneConfig& cfg) {
  int pairs = 0;
  for (std::size_t i = 0; i < st.drones.size(); ++i) {
    for (std::size_t j = i + 1; j < st.drones.size(); ++j) {
      if (distance(st.drones[i], st.drones[j]) <= cfg.collision_distance) ++pairs;
    }
  }
  return pairs;
}

int DroneEnv::coverage_count() const { return ppmarl::coverage_count(st_, cfg_); }
int DroneEnv::collision_pairs() const { return ppmarl::collision_pairs(st_, cfg_); }

Vec DroneEnv::state_summary() const {
  Vec s;
  s.reserve(2 * (st_.drones.size() + st_.targets.size()) + 1);
  for (const auto& d : st_.drones) {
    s.push_back(d.x);
    s.push_back(d.y);
  }
  for (const auto& t : st_.targets) {
    s.push_back(t.x);
    s.push_back(t.y);
  }
  s.push_back(static_cast<double>(st_.step_index));
  return s;
}

}  // namespace ppmarl
