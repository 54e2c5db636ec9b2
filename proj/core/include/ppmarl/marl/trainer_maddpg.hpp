#pragma once

#include <unordered_map>

#include "ppmarl/marl/trainer.hpp"
#include "ppmarl/nn/optimizer.hpp"

namespace ppmarl {

// Centralized training baseline: agents stream their raw experiences to the
// coordinator (central replay), joint-input critics and the authoritative
// actors live centrally, updated actor weights are pushed back for execution.
class MaddpgTrainer final : public Trainer {
 public:
  MaddpgTrainer(const EnvDims& dims, const TrainingConfig& cfg, MessageBus* bus,
                std::uint64_t seed);

  std::string kind_name() const override { return "maddpg"; }
  std::vector<Vec> act(const std::vector<Vec>& obs, double noise_scale) override;
  void observe(MemoryId id, const std::vector<Experience>& per_agent) override;
  bool update() override;
  void save_checkpoints(const std::filesystem::path& dir) const override;

  const Mlp& actor(int i) const { return central_[i].actor; }
  const Mlp& critic(int i) const { return central_[i].critic; }

 private:
  struct CentralAgent {
    Mlp actor, critic, actor_target, critic_target;
    Optimizer actor_opt, critic_opt;
  };

  Vec joint_critic_input(const std::vector<Experience>& exps,
                         const std::vector<const Vec*>& actions) const;
  void push_actor_weights();

  EnvDims dims_;
  TrainingConfig cfg_;
  MessageBus* bus_;
  std::vector<CentralAgent> central_;
  std::vector<Mlp> exec_actors_;  // execution replicas, synced via the bus
  std::vector<Rng> noise_rngs_;
  Rng sampler_rng_;

  // Central replay of joint experiences.
  std::deque<MemoryId> order_;
  std::unordered_map<std::uint64_t, std::vector<Experience>> replay_;
};

}  // namespace ppmarl
