#include "ppmarl/marl/trainer.hpp"

#include <algorithm>

#include "ppmarl/marl/trainer_ddpg.hpp"
#include "ppmarl/marl/trainer_maddpg.hpp"
#include "ppmarl/marl/trainer_ppmarl.hpp"

namespace ppmarl {

const char* to_string(TrainerKind k) {
  switch (k) {
    case TrainerKind::pp_marl: return "pp_marl";
    case TrainerKind::maddpg: return "maddpg";
    case TrainerKind::ddpg: return "ddpg";
  }
  return "pp_marl";
}

TrainerKind trainer_kind_from_string(const std::string& s) {
  if (s == "pp_marl") return TrainerKind::pp_marl;
  if (s == "maddpg") return TrainerKind::maddpg;
  if (s == "ddpg") return TrainerKind::ddpg;
  throw ConfigError("unknown trainer kind: " + s);
}

const char* to_string(PrivacyKind k) {
  switch (k) {
    case PrivacyKind::none: return "none";
    case PrivacyKind::he_interactive: return "he_interactive";
    case PrivacyKind::he_linear: return "he_linear";
    case PrivacyKind::dp: return "dp";
  }
  return "none";
}

PrivacyKind privacy_kind_from_string(const std::string& s) {
  if (s == "none") return PrivacyKind::none;
  if (s == "he_interactive") return PrivacyKind::he_interactive;
  if (s == "he_linear") return PrivacyKind::he_linear;
  if (s == "dp") return PrivacyKind::dp;
  throw ConfigError("unknown privacy kind: " + s);
}

void PrivacyConfig::validate() const {
  if (kind == PrivacyKind::dp) dp.validate();
  if (kind == PrivacyKind::he_interactive || kind == PrivacyKind::he_linear) {
    if (he_key_bits < 512) throw ConfigError("privacy: he_key_bits must be >= 512");
    if (fraction_bits < 8 || fraction_bits > 64) {
      throw ConfigError("privacy: fraction_bits must be in [8, 64]");
    }
    if (keyholder < 0) throw ConfigError("privacy: keyholder must be an agent index");
  }
}

void TrainingConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("trainer: gamma must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("trainer: batch_size must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("trainer: tau must be in (0, 1]");
  if (update_every < 1) throw ConfigError("trainer: update_every must be >= 1");
  if (warmup_steps < 0) throw ConfigError("trainer: warmup_steps must be >= 0");
  if (q_dim < 1) throw ConfigError("trainer: q_dim must be >= 1");
  if (memory_capacity < batch_size) {
    throw ConfigError("trainer: memory_capacity must be >= batch_size");
  }
  if (!(actor_lr > 0.0 && critic_lr > 0.0 && global_lr >= 0.0)) {
    throw ConfigError("trainer: learning rates must be positive (global_lr may be 0)");
  }
  if (noise_decay_steps < 1) throw ConfigError("trainer: noise_decay_steps must be >= 1");
  if (reward_groups != 1) {
    throw ConfigError("trainer: only one shared-reward group is supported");
  }
  activation_from_string(global_hidden_act);
  optim_algo_from_string(optimizer);
}

double TrainingConfig::noise_at(std::uint64_t env_steps) const {
  const double frac =
      std::min(1.0, static_cast<double>(env_steps) / static_cast<double>(noise_decay_steps));
  return noise_scale_start + frac * (noise_scale_end - noise_scale_start);
}

OptimConfig TrainingConfig::actor_opt() const {
  OptimConfig c;
  c.algo = optim_algo_from_string(optimizer);
  c.lr = actor_lr;
  return c;
}

OptimConfig TrainingConfig::critic_opt() const {
  OptimConfig c;
  c.algo = optim_algo_from_string(optimizer);
  c.lr = critic_lr;
  return c;
}

OptimConfig TrainingConfig::global_opt() const {
  OptimConfig c;
  c.algo = optim_algo_from_string(optimizer);
  // global_lr == 0 means "frozen global critic" (used by reduction tests);
  // the Optimizer requires a positive lr, so freeze via sgd at lr tending to
  // zero is not expressible -- the pp trainer skips the step instead.
  c.lr = global_lr > 0.0 ? global_lr : 1.0;
  return c;
}

std::unique_ptr<Trainer> make_trainer(TrainerKind kind, const EnvDims& dims,
                                      const TrainingConfig& cfg, const PrivacyConfig& privacy,
                                      MessageBus* bus, std::uint64_t seed) {
  cfg.validate();
  privacy.validate();
  if (dims.n_agents < 1 || dims.obs_dim < 1 || dims.action_dim < 1 || dims.episode_len < 1) {
    throw ConfigError("trainer: invalid environment dimensions");
  }
  if (privacy.kind != PrivacyKind::none && kind != TrainerKind::pp_marl) {
    throw ConfigError("privacy modes are only supported by the pp_marl trainer");
  }
  switch (kind) {
    case TrainerKind::pp_marl:
      return std::make_unique<PpMarlTrainer>(dims, cfg, privacy, bus, seed);
    case TrainerKind::maddpg:
      return std::make_unique<MaddpgTrainer>(dims, cfg, bus, seed);
    case TrainerKind::ddpg:
      return std::make_unique<DdpgTrainer>(dims, cfg, seed);
  }
  throw ConfigError("unknown trainer kind");
}

}  // namespace ppmarl
