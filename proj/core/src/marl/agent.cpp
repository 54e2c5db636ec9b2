#include "ppmarl/marl/agent.hpp"

#include "ppmarl/env/vec2.hpp"

namespace ppmarl {

Agent::Agent(int index, const AgentConfig& cfg, std::uint64_t seed)
    : index_(index),
      q_dim_(cfg.q_dim),
      actor_(make_mlp(cfg.obs_dim, cfg.actor_hidden, cfg.action_dim, Activation::relu,
                      Activation::tanh, derive_seed(seed, "actor", index))),
      critic_(make_mlp(cfg.obs_dim + cfg.action_dim, cfg.critic_hidden, cfg.q_dim,
                       Activation::relu, Activation::linear, derive_seed(seed, "critic", index))),
      actor_target_(actor_),
      critic_target_(critic_),
      actor_opt_(actor_, cfg.actor_opt),
      critic_opt_(critic_, cfg.critic_opt),
      actor_grads_(make_grad_buffer(actor_)),
      critic_grads_(make_grad_buffer(critic_)),
      scratch_grads_(make_grad_buffer(critic_)),
      memory_(cfg.memory_capacity),
      noise_rng_(derive_seed(seed, "noise", index)) {
  if (cfg.obs_dim <= 0 || cfg.action_dim <= 0) throw ConfigError("agent: bad dimensions");
  if (cfg.q_dim == 0) throw ConfigError("agent: q_dim must be >= 1");
}

Vec Agent::act(const Vec& obs, double noise_scale) {
  Vec a = forward(actor_, obs);
  if (noise_scale > 0.0) {
    for (double& x : a) x += noise_scale * noise_rng_.gaussian();
  }
  for (double& x : a) x = clamp(x, -1.0, 1.0);
  return a;
}

Vec Agent::critic_input(const Vec& obs, const Vec& action) const {
  Vec in;
  in.reserve(obs.size() + action.size());
  in.insert(in.end(), obs.begin(), obs.end());
  in.insert(in.end(), action.begin(), action.end());
  return in;
}

std::optional<Vec> Agent::local_q(MemoryId id, bool use_target, const Vec* action_override) {
  const Experience* exp = memory_.find(id);
  if (!exp) return std::nullopt;
  if (use_target) {
    const Vec next_action = forward(actor_target_, exp->next_obs);
    return forward(critic_target_, critic_input(exp->next_obs, next_action));
  }
  ForwardTape tape;
  Vec q = forward(critic_, critic_input(exp->obs, action_override ? *action_override : exp->action),
                  &tape);
  critic_tapes_[id.key()] = std::move(tape);
  return q;
}

std::optional<Vec> Agent::policy_q(MemoryId id) {
  const Experience* exp = memory_.find(id);
  if (!exp) return std::nullopt;
  PolicyTapes tapes;
  const Vec action = forward(actor_, exp->obs, &tapes.actor);
  Vec q = forward(critic_, critic_input(exp->obs, action), &tapes.critic);
  policy_tapes_[id.key()] = std::move(tapes);
  return q;
}

std::pair<double, Vec> Agent::critic_loss(const std::vector<MemoryId>& ids,
                                          const Vec& r_hat) const {
  if (ids.size() != r_hat.size()) throw UsageError("critic_loss: batch length mismatch");
  if (ids.empty()) throw UsageError("critic_loss: empty batch");
  const double inv_b = 1.0 / static_cast<double>(ids.size());
  double loss = 0.0;
  Vec upstream(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Experience* exp = memory_.find(ids[i]);
    if (!exp) throw UsageError("critic_loss: id not in local memory");
    const double resid = r_hat[i] - exp->reward;
    loss += resid * resid * inv_b;
    upstream[i] = 2.0 * resid * inv_b;
  }
  return {loss, upstream};
}

void Agent::apply_critic_grad(const std::vector<MemoryId>& ids,
                              const std::vector<Vec>& dloss_dq) {
  if (ids.size() != dloss_dq.size()) throw UsageError("apply_critic_grad: length mismatch");
  critic_grads_.zero();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = critic_tapes_.find(ids[i].key());
    if (it == critic_tapes_.end()) {
      throw UsageError("apply_critic_grad: no forward tape for id");
    }
    backward(critic_, it->second, dloss_dq[i], critic_grads_);
  }
  critic_opt_.step(critic_, critic_grads_);
}

void Agent::apply_actor_grad(const std::vector<MemoryId>& ids, const std::vector<Vec>& dj_dq) {
  if (ids.size() != dj_dq.size()) throw UsageError("apply_actor_grad: length mismatch");
  actor_grads_.zero();
  const std::size_t obs_dim = actor_.in_dim();
  const std::size_t action_dim = actor_.out_dim();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = policy_tapes_.find(ids[i].key());
    if (it == policy_tapes_.end()) {
      throw UsageError("apply_actor_grad: no policy tape for id");
    }
    scratch_grads_.zero();  // critic params stay fixed during actor rounds
    const Vec input_grad = backward(critic_, it->second.critic, dj_dq[i], scratch_grads_);
    Vec action_grad(input_grad.begin() + obs_dim, input_grad.begin() + obs_dim + action_dim);
    backward(actor_, it->second.actor, action_grad, actor_grads_);
  }
  // Ascend on J: the optimizer minimizes, so feed the negated gradient.
  actor_grads_.scale(-1.0);
  actor_opt_.step(actor_, actor_grads_);
}

void Agent::soft_update_targets(double tau) {
  soft_update(actor_target_, actor_, tau);
  soft_update(critic_target_, critic_, tau);
}

void Agent::clear_tapes() {
  critic_tapes_.clear();
  policy_tapes_.clear();
}

}  // namespace ppmarl
