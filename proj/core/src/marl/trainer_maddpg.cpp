#include "ppmarl/marl/trainer_maddpg.hpp"

#include "ppmarl/env/vec2.hpp"

namespace ppmarl {

MaddpgTrainer::MaddpgTrainer(const EnvDims& dims, const TrainingConfig& cfg, MessageBus* bus,
                             std::uint64_t seed)
    : dims_(dims), cfg_(cfg), bus_(bus), sampler_rng_(derive_seed(seed, "sampler")) {
  const std::size_t joint_in =
      static_cast<std::size_t>(dims.n_agents) * (dims.obs_dim + dims.action_dim);
  for (int i = 0; i < dims.n_agents; ++i) {
    Mlp actor = make_mlp(dims.obs_dim, cfg.actor_hidden, dims.action_dim, Activation::relu,
                         Activation::tanh, derive_seed(seed, "actor", i));
    Mlp critic = make_mlp(joint_in, cfg.critic_hidden, 1, Activation::relu, Activation::linear,
                          derive_seed(seed, "critic", i));
    central_.push_back(CentralAgent{
        .actor = actor,
        .critic = critic,
        .actor_target = actor,
        .critic_target = critic,
        .actor_opt = Optimizer(actor, cfg.actor_opt()),
        .critic_opt = Optimizer(critic, cfg.critic_opt()),
    });
    exec_actors_.push_back(actor);
    noise_rngs_.emplace_back(derive_seed(seed, "noise", i));
  }
}

std::vector<Vec> MaddpgTrainer::act(const std::vector<Vec>& obs, double noise_scale) {
  if (static_cast<int>(obs.size()) != dims_.n_agents) throw UsageError("act: obs count mismatch");
  std::vector<Vec> actions(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    Vec a = forward(exec_actors_[i], obs[i]);
    if (noise_scale > 0.0) {
      for (double& x : a) x += noise_scale * noise_rngs_[i].gaussian();
    }
    for (double& x : a) x = clamp(x, -1.0, 1.0);
    actions[i] = std::move(a);
  }
  return actions;
}

void MaddpgTrainer::observe(MemoryId id, const std::vector<Experience>& per_agent) {
  if (static_cast<int>(per_agent.size()) != dims_.n_agents) {
    throw UsageError("observe: experience count mismatch");
  }
  if (replay_.count(id.key())) throw UsageError("maddpg: duplicate id");
  // Raw experience upload: this is the privacy cost of the centralized mode.
  if (bus_) {
    for (int i = 0; i < dims_.n_agents; ++i) {
      const Experience& e = per_agent[i];
      Payload p;
      p.ids = {id};
      p.values.reserve(e.obs.size() + e.action.size() + 1 + e.next_obs.size());
      p.values.insert(p.values.end(), e.obs.begin(), e.obs.end());
      p.values.insert(p.values.end(), e.action.begin(), e.action.end());
      p.values.push_back(e.reward);
      p.values.insert(p.values.end(), e.next_obs.begin(), e.next_obs.end());
      p.blob_bytes = 1;  // done flag
      bus_->send(MsgKind::experience, i, kCoordinator, std::move(p));
    }
  }
  if (order_.size() == cfg_.memory_capacity) {
    replay_.erase(order_.front().key());
    order_.pop_front();
  }
  order_.push_back(id);
  replay_.emplace(id.key(), per_agent);
}

Vec MaddpgTrainer::joint_critic_input(const std::vector<Experience>& exps,
                                      const std::vector<const Vec*>& actions) const {
  Vec x;
  x.reserve(central_[0].critic.in_dim());
  for (const auto& e : exps) x.insert(x.end(), e.obs.begin(), e.obs.end());
  for (const Vec* a : actions) x.insert(x.end(), a->begin(), a->end());
  return x;
}

bool MaddpgTrainer::update() {
  if (order_.size() < cfg_.batch_size) return false;
  const auto batch = sample_ids(order_, cfg_.batch_size, sampler_rng_);
  const std::size_t B = batch.size();
  const double inv_b = 1.0 / static_cast<double>(B);
  const int n = dims_.n_agents;

  // Per-id target joint next actions (shared across the agents' critics).
  std::vector<std::vector<Vec>> next_actions(B, std::vector<Vec>(n));
  for (std::size_t b = 0; b < B; ++b) {
    const auto& exps = replay_.at(batch[b].key());
    for (int j = 0; j < n; ++j) {
      next_actions[b][j] = forward(central_[j].actor_target, exps[j].next_obs);
    }
  }

  double loss_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    CentralAgent& ca = central_[i];
    GradBuffer cgrads = make_grad_buffer(ca.critic);
    double loss = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const auto& exps = replay_.at(batch[b].key());
      Vec next_in;
      next_in.reserve(ca.critic.in_dim());
      for (const auto& e : exps) next_in.insert(next_in.end(), e.next_obs.begin(), e.next_obs.end());
      for (const auto& a : next_actions[b]) next_in.insert(next_in.end(), a.begin(), a.end());
      const double target_q = forward(ca.critic_target, next_in)[0];
      const double y =
          exps[i].reward + cfg_.gamma * (exps[i].done ? 0.0 : 1.0) * target_q;

      std::vector<const Vec*> stored;
      stored.reserve(n);
      for (int j = 0; j < n; ++j) stored.push_back(&exps[j].action);
      ForwardTape tape;
      const double q = forward(ca.critic, joint_critic_input(exps, stored), &tape)[0];
      const double resid = q - y;
      loss += resid * resid * inv_b;
      backward(ca.critic, tape, Vec{2.0 * resid * inv_b}, cgrads);
    }
    ca.critic_opt.step(ca.critic, cgrads);
    loss_sum += loss;
    if (bus_) {
      bus_->ops().critic_mults += B * 3 * forward_mult_count(ca.critic);
    }

    // Actor ascent through the joint critic.
    GradBuffer agrads = make_grad_buffer(ca.actor);
    GradBuffer scratch = make_grad_buffer(ca.critic);
    const std::size_t action_offset =
        static_cast<std::size_t>(n) * dims_.obs_dim +
        static_cast<std::size_t>(i) * dims_.action_dim;
    for (std::size_t b = 0; b < B; ++b) {
      const auto& exps = replay_.at(batch[b].key());
      ForwardTape atape, ctape;
      const Vec a_i = forward(ca.actor, exps[i].obs, &atape);
      std::vector<const Vec*> actions;
      actions.reserve(n);
      for (int j = 0; j < n; ++j) actions.push_back(j == i ? &a_i : &exps[j].action);
      forward(ca.critic, joint_critic_input(exps, actions), &ctape);
      scratch.zero();
      const Vec input_grad = backward(ca.critic, ctape, Vec{inv_b}, scratch);
      const Vec action_grad(input_grad.begin() + action_offset,
                            input_grad.begin() + action_offset + dims_.action_dim);
      backward(ca.actor, atape, action_grad, agrads);
    }
    agrads.scale(-1.0);
    ca.actor_opt.step(ca.actor, agrads);
    if (bus_) {
      bus_->ops().actor_mults +=
          B * (2 * forward_mult_count(ca.actor) + 2 * forward_mult_count(ca.critic));
    }

    soft_update(ca.actor_target, ca.actor, cfg_.tau);
    soft_update(ca.critic_target, ca.critic, cfg_.tau);
  }
  last_loss_ = loss_sum / n;

  push_actor_weights();
  ++updates_;
  return true;
}

void MaddpgTrainer::push_actor_weights() {
  for (int i = 0; i < dims_.n_agents; ++i) {
    exec_actors_[i] = central_[i].actor;
    if (bus_) {
      Payload p;
      p.values.assign(central_[i].actor.param_count(), 0.0);
      bus_->send(MsgKind::weights, kCoordinator, i, std::move(p));
    }
  }
}

void MaddpgTrainer::save_checkpoints(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < central_.size(); ++i) {
    save_checkpoint(central_[i].actor, dir / ("agent" + std::to_string(i) + "_actor.json"));
    save_checkpoint(central_[i].critic, dir / ("agent" + std::to_string(i) + "_critic.json"));
  }
}

}  // namespace ppmarl
