#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "ppmarl/common.hpp"
#include "ppmarl/rng.hpp"

namespace ppmarl {

// Raised when an accumulated plaintext magnitude no longer fits the message
// space (half the modulus, since messages are signed).
class HeOverflowError : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

// Additively homomorphic Paillier ciphertext. `scale_mult` tracks the
// fixed-point scale of the encoded value (grows under plaintext products);
// `mag_bits` is a running bound on the plaintext magnitude used for overflow
// detection; `key_id` guards against mixing ciphertexts from different keys.
struct Ciphertext {
  mpz_class value;  // element of Z_{n^2}
  int scale_mult = 1;
  int mag_bits = 0;
  std::uint64_t key_id = 0;
};

// Paillier key pair and operations: n = p*q, g = n+1,
// Enc(m; r) = (1+mn) * r^n mod n^2, Dec(c) = L(c^lambda mod n^2) * mu mod n.
// Messages are signed: residues above n/2 decode as negative.
class Paillier {
 public:
  // Deterministic under seed (tests use small keys). bits is the size of n.
  static Paillier generate(int bits, std::uint64_t seed);

  Ciphertext encrypt(const mpz_class& m, Rng& rng) const;
  mpz_class decrypt(const Ciphertext& c) const;

  // Dec(add(Enc a, Enc b)) = a + b. Requires matching key and scale.
  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  // Dec(scale_int(k, Enc a)) = k * a; the result's scale grows by k's scale.
  Ciphertext scale_int(const mpz_class& k, const Ciphertext& c, int k_scale_mult = 1) const;

  int key_bits() const { return key_bits_; }
  std::uint64_t key_id() const { return key_id_; }
  const mpz_class& n() const { return n_; }
  // Canonical wire size of one ciphertext (element of Z_{n^2}).
  std::size_t ciphertext_bytes() const { return static_cast<std::size_t>(key_bits_) / 4; }

  // Fills `out` with the canonical big-endian bytes of the ciphertext value
  // (fixed width), used for the byte-level entropy check and attack features.
  std::vector<std::uint8_t> serialize(const Ciphertext& c) const;

  std::string public_key_json() const;
  std::string secret_key_json() const;
  static Paillier from_key_json(const std::string& pub, const std::string& sec);

 private:
  Paillier() = default;
  void check(const Ciphertext& c) const;

  mpz_class n_, n2_, lambda_, mu_;
  int key_bits_ = 0;
  std::uint64_t key_id_ = 0;
};

mpz_class random_mpz_bits(Rng& rng, int bits);

}  // namespace ppmarl
