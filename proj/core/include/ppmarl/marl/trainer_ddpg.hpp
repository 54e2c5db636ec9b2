#pragma once

#include "ppmarl/marl/trainer.hpp"
#include "ppmarl/nn/optimizer.hpp"

namespace ppmarl {

// Independent learners: each agent trains a local critic on its own
// observations and actions only. No messages, no coordinator.
class DdpgTrainer final : public Trainer {
 public:
  DdpgTrainer(const EnvDims& dims, const TrainingConfig& cfg, std::uint64_t seed);

  std::string kind_name() const override { return "ddpg"; }
  std::vector<Vec> act(const std::vector<Vec>& obs, double noise_scale) override;
  void observe(MemoryId id, const std::vector<Experience>& per_agent) override;
  bool update() override;
  void save_checkpoints(const std::filesystem::path& dir) const override;

  const Mlp& actor(int i) const { return pers_[i].actor; }
  const Mlp& critic(int i) const { return pers_[i].critic; }

 private:
  struct PerAgent {
    Mlp actor, critic, actor_target, critic_target;
    Optimizer actor_opt, critic_opt;
    LocalMemory memory;
    Rng noise_rng;
    Rng sampler_rng;
  };

  void update_agent(PerAgent& p);

  EnvDims dims_;
  TrainingConfig cfg_;
  std::vector<PerAgent> pers_;
};

}  // namespace ppmarl
