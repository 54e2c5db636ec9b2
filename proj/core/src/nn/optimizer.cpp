#include "ppmarl/nn/optimizer.hpp"

#include <cmath>

namespace ppmarl {

const char* to_string(OptimAlgo a) { return a == OptimAlgo::sgd ? "sgd" : "adam"; }

OptimAlgo optim_algo_from_string(const std::string& s) {
  if (s == "sgd") return OptimAlgo::sgd;
  if (s == "adam") return OptimAlgo::adam;
  throw ConfigError("unknown optimizer: " + s);
}

Optimizer::Optimizer(const Mlp& net, OptimConfig cfg) : cfg_(cfg) {
  if (!(cfg.lr > 0.0)) throw ConfigError("optimizer: learning rate must be positive");
  if (cfg.algo == OptimAlgo::adam) {
    m_ = make_grad_buffer(net);
    v_ = make_grad_buffer(net);
  }
}

void Optimizer::step(Mlp& net, const GradBuffer& grads) {
  if (grads.dw.size() != net.layers.size()) throw UsageError("optimizer: grad buffer mismatch");
  if (!grads.finite()) {
    throw TrainingError("optimizer: non-finite gradient (step " + std::to_string(t_) + ")");
  }
  ++t_;

  if (cfg_.algo == OptimAlgo::sgd) {
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      auto& layer = net.layers[l];
      for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
        layer.weights.data[i] -= cfg_.lr * grads.dw[l].data[i];
      }
      for (std::size_t i = 0; i < layer.bias.size(); ++i) {
        layer.bias[i] -= cfg_.lr * grads.db[l][i];
      }
    }
    return;
  }

  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  auto update = [&](double& p, double& m, double& v, double g) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
    const double mhat = m / bc1;
    const double vhat = v / bc2;
    p -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
      update(layer.weights.data[i], m_.dw[l].data[i], v_.dw[l].data[i], grads.dw[l].data[i]);
    }
    for (std::size_t i = 0; i < layer.bias.size(); ++i) {
      update(layer.bias[i], m_.db[l][i], v_.db[l][i], grads.db[l][i]);
    }
  }
}

}  // namespace ppmarl
