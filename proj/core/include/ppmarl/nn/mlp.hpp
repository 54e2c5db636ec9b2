#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ppmarl/nn/tensor.hpp"

namespace ppmarl {

// `square` exists for critics that must be evaluable under additive
// homomorphic encryption (polynomial activations only).
enum class Activation { linear, relu, tanh, square };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct DenseLayer {
  Mat weights;  // [out x in]
  Vec bias;     // [out]
  Activation act = Activation::linear;
};

struct Mlp {
  std::vector<DenseLayer> layers;

  std::size_t in_dim() const { return layers.empty() ? 0 : layers.front().weights.cols; }
  std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().weights.rows; }
  std::size_t param_count() const;
};

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero bias.
Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
             Activation hidden_act, Activation out_act, std::uint64_t seed);

// Activation cache from one forward pass; required by backward.
struct ForwardTape {
  Vec input;
  std::vector<Vec> pre;   // pre-activations per layer
  std::vector<Vec> post;  // activations per layer
};

Vec forward(const Mlp& net, const Vec& input, ForwardTape* tape = nullptr);

struct GradBuffer {
  std::vector<Mat> dw;
  std::vector<Vec> db;

  void zero();
  void scale(double k);
  // this += k * other (shape-congruent)
  void axpy(double k, const GradBuffer& other);
  bool finite() const;
};

GradBuffer make_grad_buffer(const Mlp& net);

// Backpropagates `out_grad` through the tape; accumulates parameter gradients
// into `grads` and returns the gradient w.r.t. the network input. Throws
// UsageError if the tape does not match the network.
Vec backward(const Mlp& net, const ForwardTape& tape, const Vec& out_grad, GradBuffer& grads);

// target <- (1 - tau) * target + tau * source, elementwise. tau in (0, 1].
void soft_update(Mlp& target, const Mlp& source, double tau);

// Analytic multiply count of one forward pass (used by overhead accounting).
std::uint64_t forward_mult_count(const Mlp& net);

// Versioned JSON checkpoint; doubles round-trip bit-exactly.
void save_checkpoint(const Mlp& net, const std::filesystem::path& path);
Mlp load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_to_string(const Mlp& net);
Mlp checkpoint_from_string(const std::string& text);

}  // namespace ppmarl
