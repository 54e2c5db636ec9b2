#pragma once

#include <optional>

#include "ppmarl/marl/coordinator.hpp"
#include "ppmarl/marl/trainer.hpp"
#include "ppmarl/privacy/he_critic.hpp"

namespace ppmarl {

// Decentralized execution, centralized training over hierarchical critics.
// One update iteration = one critic round plus one actor round per agent,
// all on one sampled batch; every exchange passes through the bus.
class PpMarlTrainer final : public Trainer {
 public:
  PpMarlTrainer(const EnvDims& dims, const TrainingConfig& cfg, const PrivacyConfig& privacy,
                MessageBus* bus, std::uint64_t seed);

  std::string kind_name() const override;
  std::vector<Vec> act(const std::vector<Vec>& obs, double noise_scale) override;
  void observe(MemoryId id, const std::vector<Experience>& per_agent) override;
  bool update() override;
  void save_checkpoints(const std::filesystem::path& dir) const override;

  Agent& agent(int i) { return *agents_[i]; }
  const Agent& agent(int i) const { return *agents_[i]; }
  Coordinator& coordinator() { return coordinator_; }
  const Coordinator& coordinator() const { return coordinator_; }
  const Paillier* paillier() const { return he_ctx_ ? &*he_ctx_ : nullptr; }

 private:
  struct BatchQ {
    // per agent: flattened q values (batch x q_dim), as used by the
    // coordinator (post privacy transform).
    std::vector<Vec> per_agent;
    Vec concat(std::size_t batch_index, std::size_t n_agents, std::size_t q_dim) const;
  };

  std::vector<MemoryId> sample_ready_batch();
  bool batch_held_by_all(const std::vector<MemoryId>& batch) const;

  // Collects per-agent q values for the batch. `policy_agent` >= 0 switches
  // that agent to actor-fed q. kind is q or target_q; sends bus messages
  // (plaintext, dp-noised, or encrypted per the privacy mode).
  BatchQ collect_q(const std::vector<MemoryId>& batch, bool use_target, int policy_agent,
                   MsgKind kind, std::vector<std::vector<Ciphertext>>* enc_out);

  // Evaluates the global critic over the batch (plain or HE path).
  Vec global_forward(const BatchQ& q, const std::vector<std::vector<Ciphertext>>& enc,
                     bool use_target, std::vector<ForwardTape>* tapes, Rng& rng);

  void critic_round(const std::vector<MemoryId>& batch);
  void actor_round(const std::vector<MemoryId>& batch, int agent_i);

  bool is_he() const {
    return privacy_.kind == PrivacyKind::he_interactive || privacy_.kind == PrivacyKind::he_linear;
  }

  EnvDims dims_;
  TrainingConfig cfg_;
  PrivacyConfig privacy_;
  MessageBus* bus_;
  std::vector<std::unique_ptr<Agent>> agents_;
  Coordinator coordinator_;
  Rng sampler_rng_;
  Rng dp_rng_;
  Rng he_rng_;
  std::optional<Paillier> he_ctx_;
  std::optional<HeGlobalCritic> he_critic_;
  std::uint64_t round_ = 0;
};

}  // namespace ppmarl
