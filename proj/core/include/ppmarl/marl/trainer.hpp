#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ppmarl/marl/agent.hpp"
#include "ppmarl/marl/bus.hpp"
#include "ppmarl/privacy/dp.hpp"

namespace ppmarl {

enum class TrainerKind { pp_marl, maddpg, ddpg };
enum class PrivacyKind { none, he_interactive, he_linear, dp };

const char* to_string(TrainerKind k);
TrainerKind trainer_kind_from_string(const std::string& s);
const char* to_string(PrivacyKind k);
PrivacyKind privacy_kind_from_string(const std::string& s);

struct PrivacyConfig {
  PrivacyKind kind = PrivacyKind::none;
  DpConfig dp;
  int he_key_bits = 2048;
  int fraction_bits = 32;
  int integer_bits = 20;
  int keyholder = 0;  // agent index holding the secret key

  void validate() const;
};

struct TrainingConfig {
  double gamma = 0.95;
  std::size_t batch_size = 32;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double global_lr = 1e-3;
  double tau = 0.01;
  int update_every = 1;     // env steps between update iterations
  int warmup_steps = 1000;  // env steps before the first update
  std::vector<std::size_t> actor_hidden{64, 64};
  std::vector<std::size_t> critic_hidden{64, 64};
  std::vector<std::size_t> global_hidden{64, 64};
  std::string global_hidden_act = "relu";
  std::size_t q_dim = 1;
  std::size_t memory_capacity = 100000;
  double noise_scale_start = 0.5;
  double noise_scale_end = 0.05;
  int noise_decay_steps = 10000;
  std::string optimizer = "adam";
  // Extension hook for heterogeneous reward teams; only one shared-reward
  // group is supported.
  int reward_groups = 1;

  void validate() const;
  double noise_at(std::uint64_t env_steps) const;
  OptimConfig actor_opt() const;
  OptimConfig critic_opt() const;
  OptimConfig global_opt() const;
};

struct EnvDims {
  int n_agents = 0;
  int obs_dim = 0;
  int action_dim = 0;
  int episode_len = 0;  // fixed horizon; done is derivable from MemoryId.step
};

// Common surface of the three trainers. The runner drives the cadence:
// act -> env.step -> observe, and calls update() per the configured schedule.
class Trainer {
 public:
  virtual ~Trainer() = default;

  virtual std::string kind_name() const = 0;
  virtual std::vector<Vec> act(const std::vector<Vec>& obs, double noise_scale) = 0;
  virtual void observe(MemoryId id, const std::vector<Experience>& per_agent) = 0;
  // Runs one update iteration if enough memory is available.
  virtual bool update() = 0;
  virtual double last_critic_loss() const { return last_loss_; }
  virtual std::uint64_t updates_done() const { return updates_; }
  virtual void save_checkpoints(const std::filesystem::path& dir) const = 0;

 protected:
  double last_loss_ = 0.0;
  std::uint64_t updates_ = 0;
};

std::unique_ptr<Trainer> make_trainer(TrainerKind kind, const EnvDims& dims,
                                      const TrainingConfig& cfg, const PrivacyConfig& privacy,
                                      MessageBus* bus, std::uint64_t seed);

}  // namespace ppmarl
