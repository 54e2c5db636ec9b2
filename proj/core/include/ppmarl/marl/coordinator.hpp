#pragma once

#include <cstdint>
#include <vector>

#include "ppmarl/marl/memory.hpp"
#include "ppmarl/nn/mlp.hpp"
#include "ppmarl/nn/optimizer.hpp"

namespace ppmarl {

struct CoordinatorConfig {
  int n_agents = 0;
  std::size_t q_dim = 1;
  std::vector<std::size_t> global_hidden{64, 64};
  Activation global_hidden_act = Activation::relu;
  OptimConfig opt;
  std::size_t memory_capacity = 100000;
};

// Central node: identifier-only global memory plus the global critic that
// merges per-agent q values into one Q.
class Coordinator {
 public:
  Coordinator(const CoordinatorConfig& cfg, std::uint64_t seed);

  GlobalMemory& memory() { return memory_; }
  const GlobalMemory& memory() const { return memory_; }

  std::vector<MemoryId> sample_batch(std::size_t batch_size, Rng& rng) const {
    return memory_.sample(batch_size, rng);
  }

  // Q = net(concat(q_1..q_n)); tape retained by the caller for backward.
  double global_q(const Vec& concat_q, bool use_target, ForwardTape* tape = nullptr) const;

  // r_hat = Q_now - gamma * Q_next_target * (1 - done)
  static double estimate_reward(double q_now, double q_next_target, double gamma, bool done);

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  Mlp& target_net() { return target_net_; }
  const Mlp& target_net() const { return target_net_; }
  Optimizer& opt() { return opt_; }
  std::size_t in_dim() const { return net_.in_dim(); }

  void soft_update_target(double tau) { soft_update(target_net_, net_, tau); }

 private:
  GlobalMemory memory_;
  Mlp net_, target_net_;
  Optimizer opt_;
};

}  // namespace ppmarl
