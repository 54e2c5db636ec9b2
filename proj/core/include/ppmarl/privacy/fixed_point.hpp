#pragma once

#include <gmpxx.h>

#include "ppmarl/common.hpp"

namespace ppmarl {

// Signed fixed-point encoding of reals as big integers, scale 2^fraction_bits.
// Ciphertext-plaintext products accumulate scale (2^2f, 2^3f, ...), tracked as
// a small integer multiplier so decode can rescale.
struct FixedPointCodec {
  int fraction_bits = 32;
  int integer_bits = 20;  // |value| < 2^integer_bits

  // round(v * 2^(fraction_bits * scale_mult)). Quantization happens at scale
  // one; higher multipliers shift the already-quantized mantissa.
  mpz_class encode(double v, int scale_mult = 1) const;
  double decode(const mpz_class& m, int scale_mult = 1) const;

  // Bits needed to represent one value at the given scale multiplier.
  int value_bits(int scale_mult) const {
    return fraction_bits * scale_mult + integer_bits + 1;
  }
};

}  // namespace ppmarl
