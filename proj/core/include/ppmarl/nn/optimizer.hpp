#pragma once

#include <cstdint>

#include "ppmarl/nn/mlp.hpp"

namespace ppmarl {

enum class OptimAlgo { sgd, adam };

const char* to_string(OptimAlgo a);
OptimAlgo optim_algo_from_string(const std::string& s);

struct OptimConfig {
  OptimAlgo algo = OptimAlgo::adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-network optimizer state (moment buffers for adam).
class Optimizer {
 public:
  Optimizer(const Mlp& net, OptimConfig cfg);

  // Applies one step in place. Gradients are left untouched; the caller is
  // responsible for zeroing its buffers between steps. Throws TrainingError
  // on non-finite gradients.
  void step(Mlp& net, const GradBuffer& grads);

  const OptimConfig& config() const { return cfg_; }
  std::uint64_t steps_taken() const { return t_; }

 private:
  OptimConfig cfg_;
  GradBuffer m_;
  GradBuffer v_;
  std::uint64_t t_ = 0;
};

}  // namespace ppmarl
