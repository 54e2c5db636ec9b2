#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppmarl/nn/tensor.hpp"

namespace ppmarl {

// Fixed-horizon cooperative multi-agent environment: per-agent partial
// observations, continuous per-agent actions in [-1, 1], one shared reward.
class MultiAgentEnv {
 public:
  virtual ~MultiAgentEnv() = default;

  virtual int n_agents() const = 0;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int steps_per_episode() const = 0;

  virtual std::vector<Vec> reset(std::uint64_t seed) = 0;

  struct StepResult {
    std::vector<Vec> obs;
    double reward = 0.0;
    bool done = false;
    double metric = 0.0;  // task metric (coverage count / mean delay)
  };
  virtual StepResult step(const std::vector<Vec>& actions) = 0;

  virtual std::string metric_name() const = 0;
  // Compact state summary for trajectory logs.
  virtual Vec state_summary() const = 0;
};

}  // namespace ppmarl
