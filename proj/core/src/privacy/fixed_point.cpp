#include "ppmarl/privacy/fixed_point.hpp"

#include <cmath>

namespace ppmarl {

mpz_class FixedPointCodec::encode(double v, int scale_mult) const {
  if (!std::isfinite(v)) throw TrainingError("fixed point: cannot encode non-finite value");
  if (std::fabs(v) >= std::ldexp(1.0, integer_bits)) {
    throw TrainingError("fixed point: value exceeds integer range");
  }
  if (scale_mult < 1) throw UsageError("fixed point: scale_mult must be >= 1");
  // Quantize once at scale 2^f, then shift for higher multipliers so that
  // encode(v, k) == encode(v, 1) << (f*(k-1)) exactly.
  const double scaled = std::round(std::ldexp(v, fraction_bits));
  mpz_class m;
  mpz_set_d(m.get_mpz_t(), scaled);
  if (scale_mult > 1) m <<= fraction_bits * (scale_mult - 1);
  return m;
}

double FixedPointCodec::decode(const mpz_class& m, int scale_mult) const {
  if (scale_mult < 1) throw UsageError("fixed point: scale_mult must be >= 1");
  const double raw = mpz_get_d(m.get_mpz_t());
  return std::ldexp(raw, -fraction_bits * scale_mult);
}

}  // namespace ppmarl
