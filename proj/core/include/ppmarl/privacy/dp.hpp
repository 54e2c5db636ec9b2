#pragma once

#include "ppmarl/nn/tensor.hpp"
#include "ppmarl/rng.hpp"

namespace ppmarl {

// Laplace mechanism over q values: clip each component to +-sensitivity then
// add Laplace(0, sensitivity/epsilon) noise.
struct DpConfig {
  double epsilon = 1.0;
  double sensitivity = 1.0;
  bool clip = true;

  double noise_scale() const { return sensitivity / epsilon; }
  void validate() const;
};

Vec dp_protect(const Vec& q, const DpConfig& cfg, Rng& rng);

}  // namespace ppmarl
