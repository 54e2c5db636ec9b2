#include "ppmarl/marl/coordinator.hpp"

#include <cmath>

namespace ppmarl {

namespace {
Mlp make_global(const CoordinatorConfig& cfg, std::uint64_t seed) {
  if (cfg.n_agents < 1) throw ConfigError("coordinator: need at least one agent");
  if (cfg.q_dim == 0) throw ConfigError("coordinator: q_dim must be >= 1");
  return make_mlp(static_cast<std::size_t>(cfg.n_agents) * cfg.q_dim, cfg.global_hidden, 1,
                  cfg.global_hidden_act, Activation::linear, derive_seed(seed, "global-critic"));
}
}  // namespace

Coordinator::Coordinator(const CoordinatorConfig& cfg, std::uint64_t seed)
    : memory_(cfg.memory_capacity),
      net_(make_global(cfg, seed)),
      target_net_(net_),
      opt_(net_, cfg.opt) {}

double Coordinator::global_q(const Vec& concat_q, bool use_target, ForwardTape* tape) const {
  if (concat_q.size() != net_.in_dim()) {
    throw UsageError("coordinator: q vector count does not match agent count");
  }
  const Mlp& net = use_target ? target_net_ : net_;
  return forward(net, concat_q, tape)[0];
}

double Coordinator::estimate_reward(double q_now, double q_next_target, double gamma, bool done) {
  if (!std::isfinite(q_now) || !std::isfinite(q_next_target)) {
    throw TrainingError("estimate_reward: non-finite critic values");
  }
  return q_now - gamma * q_next_target * (done ? 0.0 : 1.0);
}

}  // namespace ppmarl
