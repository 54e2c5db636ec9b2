#include "ppmarl/marl/trainer_ddpg.hpp"

#include "ppmarl/env/vec2.hpp"

namespace ppmarl {

DdpgTrainer::DdpgTrainer(const EnvDims& dims, const TrainingConfig& cfg, std::uint64_t seed)
    : dims_(dims), cfg_(cfg) {
  for (int i = 0; i < dims.n_agents; ++i) {
    Mlp actor = make_mlp(dims.obs_dim, cfg.actor_hidden, dims.action_dim, Activation::relu,
                         Activation::tanh, derive_seed(seed, "actor", i));
    Mlp critic = make_mlp(dims.obs_dim + dims.action_dim, cfg.critic_hidden, 1, Activation::relu,
                          Activation::linear, derive_seed(seed, "critic", i));
    pers_.push_back(PerAgent{
        .actor = actor,
        .critic = critic,
        .actor_target = actor,
        .critic_target = critic,
        .actor_opt = Optimizer(actor, cfg.actor_opt()),
        .critic_opt = Optimizer(critic, cfg.critic_opt()),
        .memory = LocalMemory(cfg.memory_capacity),
        .noise_rng = Rng(derive_seed(seed, "noise", i)),
        .sampler_rng = Rng(derive_seed(seed, "sampler", i)),
    });
  }
}

std::vector<Vec> DdpgTrainer::act(const std::vector<Vec>& obs, double noise_scale) {
  if (static_cast<int>(obs.size()) != dims_.n_agents) throw UsageError("act: obs count mismatch");
  std::vector<Vec> actions(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    Vec a = forward(pers_[i].actor, obs[i]);
    if (noise_scale > 0.0) {
      for (double& x : a) x += noise_scale * pers_[i].noise_rng.gaussian();
    }
    for (double& x : a) x = clamp(x, -1.0, 1.0);
    actions[i] = std::move(a);
  }
  return actions;
}

void DdpgTrainer::observe(MemoryId id, const std::vector<Experience>& per_agent) {
  if (static_cast<int>(per_agent.size()) != dims_.n_agents) {
    throw UsageError("observe: experience count mismatch");
  }
  for (int i = 0; i < dims_.n_agents; ++i) pers_[i].memory.store(id, per_agent[i]);
}

bool DdpgTrainer::update() {
  if (pers_[0].memory.size() < cfg_.batch_size) return false;
  double loss_sum = 0.0;
  for (auto& p : pers_) {
    update_agent(p);
    loss_sum += last_loss_;
  }
  last_loss_ = loss_sum / static_cast<double>(pers_.size());
  ++updates_;
  return true;
}

void DdpgTrainer::update_agent(PerAgent& p) {
  const auto batch = sample_ids(p.memory.order(), cfg_.batch_size, p.sampler_rng);
  const std::size_t B = batch.size();
  const double inv_b = 1.0 / static_cast<double>(B);

  auto critic_input = [](const Experience& e, const Vec& action) {
    Vec x;
    x.reserve(e.obs.size() + action.size());
    x.insert(x.end(), e.obs.begin(), e.obs.end());
    x.insert(x.end(), action.begin(), action.end());
    return x;
  };

  // Critic: MSE against r + gamma * Q_target(o', actor_target(o')).
  GradBuffer cgrads = make_grad_buffer(p.critic);
  double loss = 0.0;
  for (const auto& id : batch) {
    const Experience& e = *p.memory.find(id);
    Vec next_in = e.next_obs;
    const Vec next_action = forward(p.actor_target, e.next_obs);
    next_in.insert(next_in.end(), next_action.begin(), next_action.end());
    const double target_q = forward(p.critic_target, next_in)[0];
    const double y = e.reward + cfg_.gamma * (e.done ? 0.0 : 1.0) * target_q;

    ForwardTape tape;
    const double q = forward(p.critic, critic_input(e, e.action), &tape)[0];
    const double resid = q - y;
    loss += resid * resid * inv_b;
    backward(p.critic, tape, Vec{2.0 * resid * inv_b}, cgrads);
  }
  p.critic_opt.step(p.critic, cgrads);
  last_loss_ = loss;

  // Actor: ascend mean Q(o, actor(o)).
  GradBuffer agrads = make_grad_buffer(p.actor);
  GradBuffer scratch = make_grad_buffer(p.critic);
  for (const auto& id : batch) {
    const Experience& e = *p.memory.find(id);
    ForwardTape atape, ctape;
    const Vec action = forward(p.actor, e.obs, &atape);
    forward(p.critic, critic_input(e, action), &ctape);
    scratch.zero();
    const Vec input_grad = backward(p.critic, ctape, Vec{inv_b}, scratch);
    const Vec action_grad(input_grad.begin() + dims_.obs_dim,
                          input_grad.begin() + dims_.obs_dim + dims_.action_dim);
    backward(p.actor, atape, action_grad, agrads);
  }
  agrads.scale(-1.0);
  p.actor_opt.step(p.actor, agrads);

  soft_update(p.actor_target, p.actor, cfg_.tau);
  soft_update(p.critic_target, p.critic, cfg_.tau);
}

void DdpgTrainer::save_checkpoints(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < pers_.size(); ++i) {
    save_checkpoint(pers_[i].actor, dir / ("agent" + std::to_string(i) + "_actor.json"));
    save_checkpoint(pers_[i].critic, dir / ("agent" + std::to_string(i) + "_critic.json"));
  }
}

}  // namespace ppmarl
