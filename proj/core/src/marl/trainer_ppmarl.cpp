#include "ppmarl/marl/trainer_ppmarl.hpp"

#include <algorithm>

namespace ppmarl {

namespace {

AgentConfig agent_config(const EnvDims& dims, const TrainingConfig& cfg) {
  AgentConfig a;
  a.obs_dim = dims.obs_dim;
  a.action_dim = dims.action_dim;
  a.q_dim = cfg.q_dim;
  a.actor_hidden = cfg.actor_hidden;
  a.critic_hidden = cfg.critic_hidden;
  a.actor_opt = cfg.actor_opt();
  a.critic_opt = cfg.critic_opt();
  a.memory_capacity = cfg.memory_capacity;
  return a;
}

CoordinatorConfig coordinator_config(const EnvDims& dims, const TrainingConfig& cfg) {
  CoordinatorConfig c;
  c.n_agents = dims.n_agents;
  c.q_dim = cfg.q_dim;
  c.global_hidden = cfg.global_hidden;
  c.global_hidden_act = activation_from_string(cfg.global_hidden_act);
  c.opt = cfg.global_opt();
  c.memory_capacity = cfg.memory_capacity;
  return c;
}

}  // namespace

PpMarlTrainer::PpMarlTrainer(const EnvDims& dims, const TrainingConfig& cfg,
                             const PrivacyConfig& privacy, MessageBus* bus, std::uint64_t seed)
    : dims_(dims),
      cfg_(cfg),
      privacy_(privacy),
      bus_(bus),
      coordinator_(coordinator_config(dims, cfg), seed),
      sampler_rng_(derive_seed(seed, "sampler")),
      dp_rng_(derive_seed(seed, "dp-noise")),
      he_rng_(derive_seed(seed, "he-encrypt")) {
  for (int i = 0; i < dims.n_agents; ++i) {
    agents_.push_back(std::make_unique<Agent>(i, agent_config(dims, cfg), seed));
  }
  if (is_he()) {
    if (privacy_.keyholder >= dims.n_agents) {
      throw ConfigError("privacy: keyholder must be a valid agent index");
    }
    he_ctx_ = Paillier::generate(privacy_.he_key_bits, derive_seed(seed, "he-keygen"));
    FixedPointCodec codec;
    codec.fraction_bits = privacy_.fraction_bits;
    codec.integer_bits = privacy_.integer_bits;
    const HeMode mode =
        privacy_.kind == PrivacyKind::he_interactive ? HeMode::he1 : HeMode::he2;
    he_critic_.emplace(mode, *he_ctx_, codec, privacy_.keyholder, bus_);
    he_critic_->check_net(coordinator_.net());
  }
}

std::string PpMarlTrainer::kind_name() const {
  switch (privacy_.kind) {
    case PrivacyKind::none: return "pp_marl";
    case PrivacyKind::he_interactive: return "pp_marl_he1";
    case PrivacyKind::he_linear: return "pp_marl_he2";
    case PrivacyKind::dp: return "pp_marl_dp";
  }
  return "pp_marl";
}

std::vector<Vec> PpMarlTrainer::act(const std::vector<Vec>& obs, double noise_scale) {
  if (static_cast<int>(obs.size()) != dims_.n_agents) throw UsageError("act: obs count mismatch");
  std::vector<Vec> actions(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) actions[i] = agents_[i]->act(obs[i], noise_scale);
  return actions;
}

void PpMarlTrainer::observe(MemoryId id, const std::vector<Experience>& per_agent) {
  if (static_cast<int>(per_agent.size()) != dims_.n_agents) {
    throw UsageError("observe: experience count mismatch");
  }
  // The coordinator derives done from the id, so stored flags must agree
  // with the fixed horizon.
  const bool done = static_cast<int>(id.step) + 1 == dims_.episode_len;
  for (const auto& exp : per_agent) {
    if (exp.done != done) throw UsageError("observe: done flag inconsistent with episode length");
  }
  for (int i = 0; i < dims_.n_agents; ++i) {
    agents_[i]->store(id, per_agent[i]);
    if (bus_) {
      Payload ack;
      ack.ids = {id};
      bus_->send(MsgKind::ids, i, kCoordinator, std::move(ack));
    }
  }
  coordinator_.memory().insert(id);
}

bool PpMarlTrainer::batch_held_by_all(const std::vector<MemoryId>& batch) const {
  for (const auto& id : batch) {
    for (const auto& agent : agents_) {
      if (!agent->experience(id)) return false;
    }
  }
  return true;
}

std::vector<MemoryId> PpMarlTrainer::sample_ready_batch() {
  // Synchronous storage keeps all memories aligned; the resample loop handles
  // the miss signal the protocol specifies anyway.
  for (int attempt = 0; attempt < 16; ++attempt) {
    auto batch = coordinator_.sample_batch(cfg_.batch_size, sampler_rng_);
    if (batch_held_by_all(batch)) return batch;
  }
  throw TrainingError("pp_marl: agents persistently miss sampled ids");
}

bool PpMarlTrainer::update() {
  if (!coordinator_.memory().ready(cfg_.batch_size)) return false;
  if (bus_) bus_->begin_round(round_ + 1);
  ++round_;

  const auto batch = sample_ready_batch();
  critic_round(batch);
  for (int i = 0; i < dims_.n_agents; ++i) actor_round(batch, i);

  for (auto& agent : agents_) agent->soft_update_targets(cfg_.tau);
  coordinator_.soft_update_target(cfg_.tau);
  for (auto& agent : agents_) agent->clear_tapes();
  ++updates_;
  return true;
}

Vec PpMarlTrainer::BatchQ::concat(std::size_t batch_index, std::size_t n_agents,
                                  std::size_t q_dim) const {
  Vec x;
  x.reserve(n_agents * q_dim);
  for (std::size_t a = 0; a < n_agents; ++a) {
    const Vec& flat = per_agent[a];
    for (std::size_t k = 0; k < q_dim; ++k) x.push_back(flat[batch_index * q_dim + k]);
  }
  return x;
}

PpMarlTrainer::BatchQ PpMarlTrainer::collect_q(const std::vector<MemoryId>& batch,
                                               bool use_target, int policy_agent, MsgKind kind,
                                               std::vector<std::vector<Ciphertext>>* enc_out) {
  const std::size_t q_dim = cfg_.q_dim;
  BatchQ out;
  out.per_agent.assign(agents_.size(), Vec());
  if (enc_out) {
    enc_out->assign(batch.size(), {});
    for (auto& row : *enc_out) row.reserve(agents_.size() * q_dim);
  }

  for (std::size_t a = 0; a < agents_.size(); ++a) {
    Vec flat;
    flat.reserve(batch.size() * q_dim);
    for (const auto& id : batch) {
      std::optional<Vec> q;
      if (static_cast<int>(a) == policy_agent) {
        q = agents_[a]->policy_q(id);
      } else {
        q = agents_[a]->local_q(id, use_target);
      }
      if (!q) throw TrainingError("pp_marl: memory miss inside a round");
      Vec value = std::move(*q);
      if (privacy_.kind == PrivacyKind::dp) value = dp_protect(value, privacy_.dp, dp_rng_);
      flat.insert(flat.end(), value.begin(), value.end());
    }

    if (bus_) {
      if (is_he()) {
        // Encrypted upload: the coordinator sees only ciphertext bytes.
        Payload p;
        p.ids = batch;
        const std::size_t cipher_bytes = he_ctx_->ciphertext_bytes();
        p.blob_bytes = batch.size() * q_dim * cipher_bytes;
        for (std::size_t b = 0; b < batch.size(); ++b) {
          Vec qv(flat.begin() + b * q_dim, flat.begin() + (b + 1) * q_dim);
          auto enc = he_critic_->encrypt_q(qv, he_rng_);
          const auto bytes = he_ctx_->serialize(enc[0]);
          p.blob_prefix.insert(p.blob_prefix.end(), bytes.begin(),
                               bytes.begin() + std::min<std::size_t>(32, bytes.size()));
          if (enc_out) {
            auto& row = (*enc_out)[b];
            row.insert(row.end(), enc.begin(), enc.end());
          }
        }
        bus_->send(MsgKind::cipher_blob, static_cast<int>(a), kCoordinator, std::move(p));
      } else {
        Payload p;
        p.ids = batch;
        p.values = flat;
        bus_->send(kind, static_cast<int>(a), kCoordinator, std::move(p));
      }
    } else if (is_he() && enc_out) {
      for (std::size_t b = 0; b < batch.size(); ++b) {
        Vec qv(flat.begin() + b * q_dim, flat.begin() + (b + 1) * q_dim);
        auto enc = he_critic_->encrypt_q(qv, he_rng_);
        auto& row = (*enc_out)[b];
        row.insert(row.end(), enc.begin(), enc.end());
      }
    }
    out.per_agent[a] = std::move(flat);
  }
  return out;
}

Vec PpMarlTrainer::global_forward(const BatchQ& q,
                                  const std::vector<std::vector<Ciphertext>>& enc,
                                  bool use_target, std::vector<ForwardTape>* tapes, Rng& rng) {
  const std::size_t batch = enc.empty() ? q.per_agent[0].size() / cfg_.q_dim : enc.size();
  Vec out(batch);
  if (is_he()) {
    const Mlp& net = use_target ? coordinator_.target_net() : coordinator_.net();
    auto result = he_critic_->forward_batch(net, enc, rng, tapes != nullptr);
    if (tapes) *tapes = std::move(result.tapes);
    return result.outputs;
  }
  if (tapes) tapes->assign(batch, ForwardTape{});
  for (std::size_t b = 0; b < batch; ++b) {
    const Vec x = q.concat(b, agents_.size(), cfg_.q_dim);
    out[b] = coordinator_.global_q(x, use_target, tapes ? &(*tapes)[b] : nullptr);
    if (bus_) {
      bus_->ops().critic_mults +=
          forward_mult_count(use_target ? coordinator_.target_net() : coordinator_.net());
    }
  }
  return out;
}

void PpMarlTrainer::critic_round(const std::vector<MemoryId>& batch) {
  const std::size_t B = batch.size();
  const std::size_t n = agents_.size();

  // (1) sampled identifiers out to every agent.
  if (bus_) {
    for (std::size_t a = 0; a < n; ++a) {
      Payload p;
      p.ids = batch;
      bus_->send(MsgKind::ids, kCoordinator, static_cast<int>(a), std::move(p));
    }
  }

  // (2) local critic values: current q and next-step target q.
  std::vector<std::vector<Ciphertext>> enc_q, enc_tq;
  BatchQ q_now = collect_q(batch, false, -1, MsgKind::q, is_he() ? &enc_q : nullptr);
  BatchQ q_next = collect_q(batch, true, -1, MsgKind::target_q, is_he() ? &enc_tq : nullptr);
  if (bus_) {
    bus_->ops().critic_mults +=
        B * n * (forward_mult_count(agents_[0]->critic()) + forward_mult_count(agents_[0]->critic_target()) +
                 forward_mult_count(agents_[0]->actor_target()));
  }

  // (3) global values and estimated rewards.
  std::vector<ForwardTape> tapes;
  const Vec q_global = global_forward(q_now, enc_q, false, &tapes, he_rng_);
  const Vec q_global_next = global_forward(q_next, enc_tq, true, nullptr, he_rng_);
  Vec r_hat(B);
  for (std::size_t b = 0; b < B; ++b) {
    const bool done = static_cast<int>(batch[b].step) + 1 == dims_.episode_len;
    r_hat[b] = Coordinator::estimate_reward(q_global[b], q_global_next[b], cfg_.gamma, done);
  }

  // (4) estimated rewards out; losses and upstream gradients back.
  std::vector<Vec> upstream(n);
  double mean_loss = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (bus_) {
      Payload p;
      p.ids = batch;
      p.values = r_hat;
      bus_->send(MsgKind::r_hat, kCoordinator, static_cast<int>(a), std::move(p));
    }
    auto [loss, up] = agents_[a]->critic_loss(batch, r_hat);
    mean_loss += loss / static_cast<double>(n);
    upstream[a] = std::move(up);
    if (bus_) {
      Payload pl;
      pl.values = {loss};
      bus_->send(MsgKind::loss, static_cast<int>(a), kCoordinator, std::move(pl));
      Payload pg;
      pg.ids = batch;
      pg.values = upstream[a];
      bus_->send(MsgKind::grad_interface, static_cast<int>(a), kCoordinator, std::move(pg));
    }
  }
  last_loss_ = mean_loss;

  // (5) backprop the mean loss through the global critic; forward the
  // resulting q-interface gradients to each agent.
  Vec dloss_dq_total;  // per batch element: d loss / d Q
  dloss_dq_total.resize(B, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    double g = 0.0;
    for (std::size_t a = 0; a < n; ++a) g += upstream[a][b];
    dloss_dq_total[b] = g / static_cast<double>(n);
  }

  GradBuffer global_grads = make_grad_buffer(coordinator_.net());
  std::vector<std::vector<Vec>> grad_q(n, std::vector<Vec>(B));
  for (std::size_t b = 0; b < B; ++b) {
    const Vec input_grad =
        backward(coordinator_.net(), tapes[b], Vec{dloss_dq_total[b]}, global_grads);
    for (std::size_t a = 0; a < n; ++a) {
      grad_q[a][b] = Vec(input_grad.begin() + a * cfg_.q_dim,
                         input_grad.begin() + (a + 1) * cfg_.q_dim);
    }
  }
  if (bus_) {
    bus_->ops().critic_mults += 2 * B * forward_mult_count(coordinator_.net());
    if (is_he()) {
      // The keyholder computed the backward pass on decrypted intermediates
      // and ships the global parameter gradients to the coordinator plus the
      // per-agent interface gradients for routing.
      Payload pg;
      pg.values.assign(coordinator_.net().param_count(), 0.0);
      Payload pq;
      pq.values.assign(B * n * cfg_.q_dim, 0.0);
      bus_->send(MsgKind::grad_interface, privacy_.keyholder, kCoordinator, std::move(pg));
      bus_->send(MsgKind::grad_q, privacy_.keyholder, kCoordinator, std::move(pq));
    }
    for (std::size_t a = 0; a < n; ++a) {
      Payload p;
      p.ids = batch;
      Vec flat;
      flat.reserve(B * cfg_.q_dim);
      for (const auto& g : grad_q[a]) flat.insert(flat.end(), g.begin(), g.end());
      p.values = std::move(flat);
      bus_->send(MsgKind::grad_q, kCoordinator, static_cast<int>(a), std::move(p));
    }
  }

  if (cfg_.global_lr > 0.0) coordinator_.opt().step(coordinator_.net(), global_grads);
  for (std::size_t a = 0; a < n; ++a) {
    agents_[a]->apply_critic_grad(batch, grad_q[a]);
    if (bus_) {
      bus_->ops().critic_mults += 2 * B * forward_mult_count(agents_[a]->critic());
    }
  }
}

void PpMarlTrainer::actor_round(const std::vector<MemoryId>& batch, int agent_i) {
  const std::size_t B = batch.size();
  const std::size_t n = agents_.size();

  // Agent i substitutes its actor's action; the others supply stored q.
  std::vector<std::vector<Ciphertext>> enc_q;
  BatchQ q = collect_q(batch, false, agent_i, MsgKind::q, is_he() ? &enc_q : nullptr);
  if (bus_) {
    bus_->ops().critic_mults += B * n * forward_mult_count(agents_[0]->critic());
    bus_->ops().actor_mults += B * forward_mult_count(agents_[agent_i]->actor());
  }

  std::vector<ForwardTape> tapes;
  global_forward(q, enc_q, false, &tapes, he_rng_);

  // d(mean Q)/dq_i per id; the global critic itself is not updated here.
  const double inv_b = 1.0 / static_cast<double>(B);
  GradBuffer scratch = make_grad_buffer(coordinator_.net());
  std::vector<Vec> dj_dq(B);
  for (std::size_t b = 0; b < B; ++b) {
    const Vec input_grad = backward(coordinator_.net(), tapes[b], Vec{inv_b}, scratch);
    dj_dq[b] = Vec(input_grad.begin() + agent_i * cfg_.q_dim,
                   input_grad.begin() + (agent_i + 1) * cfg_.q_dim);
  }
  if (bus_) {
    bus_->ops().critic_mults += B * forward_mult_count(coordinator_.net());
    if (is_he()) {
      Payload pq;
      pq.values.assign(B * cfg_.q_dim, 0.0);
      bus_->send(MsgKind::grad_q, privacy_.keyholder, kCoordinator, std::move(pq));
    }
    Payload p;
    p.ids = batch;
    Vec flat;
    flat.reserve(B * cfg_.q_dim);
    for (const auto& g : dj_dq) flat.insert(flat.end(), g.begin(), g.end());
    p.values = std::move(flat);
    bus_->send(MsgKind::grad_q, kCoordinator, agent_i, std::move(p));
    bus_->ops().actor_mults += 2 * B * (forward_mult_count(agents_[agent_i]->critic()) +
                                        forward_mult_count(agents_[agent_i]->actor()));
  }
  agents_[agent_i]->apply_actor_grad(batch, dj_dq);
}

void PpMarlTrainer::save_checkpoints(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (std::size_t a = 0; a < agents_.size(); ++a) {
    save_checkpoint(agents_[a]->actor(), dir / ("agent" + std::to_string(a) + "_actor.json"));
    save_checkpoint(agents_[a]->critic(), dir / ("agent" + std::to_string(a) + "_critic.json"));
  }
  save_checkpoint(coordinator_.net(), dir / "global_critic.json");
}

}  // namespace ppmarl
