#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppmarl/marl/memory.hpp"
#include "ppmarl/nn/mlp.hpp"
#include "ppmarl/nn/optimizer.hpp"
#include "ppmarl/rng.hpp"

namespace ppmarl {

struct AgentConfig {
  int obs_dim = 0;
  int action_dim = 0;
  std::size_t q_dim = 1;
  std::vector<std::size_t> actor_hidden{64, 64};
  std::vector<std::size_t> critic_hidden{64, 64};
  OptimConfig actor_opt;
  OptimConfig critic_opt;
  std::size_t memory_capacity = 100000;
};

// One agent's private half of the hierarchy: actor, local critic, targets,
// and the local experience memory. Nothing in here serializes experiences;
// the trainer decides what goes on the bus.
class Agent {
 public:
  Agent(int index, const AgentConfig& cfg, std::uint64_t seed);

  int index() const { return index_; }

  // clamp(actor(obs) + gaussian * noise_scale, -1, 1); deterministic when
  // noise_scale == 0.
  Vec act(const Vec& obs, double noise_scale);

  void store(MemoryId id, Experience exp) { memory_.store(id, std::move(exp)); }
  const Experience* experience(MemoryId id) const { return memory_.find(id); }

  // Local critic value for a stored experience. Returns nullopt on a memory
  // miss (the coordinator resamples). With use_target the value is the
  // Bellman next-step term: target critic on (next_obs, target_actor(next_obs)).
  // Live calls retain a forward tape for apply_critic_grad.
  std::optional<Vec> local_q(MemoryId id, bool use_target, const Vec* action_override = nullptr);

  // Actor-round evaluation: q on (obs, actor(obs)) with both tapes retained
  // for apply_actor_grad.
  std::optional<Vec> policy_q(MemoryId id);

  // Mean squared error between estimated and stored rewards. Returns
  // (loss, d loss / d r_hat per id). Stored rewards never leave the agent.
  std::pair<double, Vec> critic_loss(const std::vector<MemoryId>& ids, const Vec& r_hat) const;

  // Critic update from coordinator-supplied gradients at the q interface.
  void apply_critic_grad(const std::vector<MemoryId>& ids, const std::vector<Vec>& dloss_dq);

  // Actor ascent from dJ/dq_i per id (J already includes the 1/batch factor).
  void apply_actor_grad(const std::vector<MemoryId>& ids, const std::vector<Vec>& dj_dq);

  void soft_update_targets(double tau);
  void clear_tapes();

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic_target() const { return critic_target_; }
  Mlp& mutable_actor() { return actor_; }
  Mlp& mutable_critic() { return critic_; }
  const LocalMemory& memory() const { return memory_; }
  std::size_t q_dim() const { return q_dim_; }

 private:
  Vec critic_input(const Vec& obs, const Vec& action) const;

  int index_;
  std::size_t q_dim_;
  Mlp actor_, critic_, actor_target_, critic_target_;
  Optimizer actor_opt_, critic_opt_;
  GradBuffer actor_grads_, critic_grads_, scratch_grads_;
  LocalMemory memory_;
  Rng noise_rng_;

  struct PolicyTapes {
    ForwardTape actor;
    ForwardTape critic;
  };
  std::unordered_map<std::uint64_t, ForwardTape> critic_tapes_;
  std::unordered_map<std::uint64_t, PolicyTapes> policy_tapes_;
};

}  // namespace ppmarl
