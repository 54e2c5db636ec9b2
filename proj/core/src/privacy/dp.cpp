#include "ppmarl/privacy/dp.hpp"

#include "ppmarl/common.hpp"
#include "ppmarl/env/vec2.hpp"

namespace ppmarl {

void DpConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("dp: epsilon must be positive");
  if (!(sensitivity > 0.0)) throw ConfigError("dp: sensitivity must be positive");
}

Vec dp_protect(const Vec& q, const DpConfig& cfg, Rng& rng) {
  cfg.validate();
  const double b = cfg.noise_scale();
  Vec out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = cfg.clip ? clamp(q[i], -cfg.sensitivity, cfg.sensitivity) : q[i];
    out[i] = v + rng.laplace(b);
  }
  return out;
}

}  // namespace ppmarl
