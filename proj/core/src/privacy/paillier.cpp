#include "ppmarl/privacy/paillier.hpp"

#include <algorithm>

#include <json.hpp>

namespace ppmarl {

mpz_class random_mpz_bits(Rng& rng, int bits) {
  const int words = (bits + 63) / 64;
  std::vector<std::uint64_t> buf(static_cast<std::size_t>(words));
  for (auto& w : buf) w = rng.next_u64();
  mpz_class out;
  mpz_import(out.get_mpz_t(), buf.size(), 1, sizeof(std::uint64_t), 0, 0, buf.data());
  // Trim to the requested width and force the top bit.
  mpz_class mask = (mpz_class(1) << bits) - 1;
  out &= mask;
  out |= mpz_class(1) << (bits - 1);
  return out;
}

Paillier Paillier::generate(int bits, std::uint64_t seed) {
  if (bits < 512) throw ConfigError("paillier: key size must be >= 512 bits");
  Rng rng(seed);
  const int half = bits / 2;

  auto next_prime = [&](int prime_bits) {
    mpz_class candidate = random_mpz_bits(rng, prime_bits);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
    return p;
  };

  mpz_class p = next_prime(half);
  mpz_class q;
  do {
    q = next_prime(half);
  } while (q == p);

  Paillier ctx;
  ctx.n_ = p * q;
  ctx.n2_ = ctx.n_ * ctx.n_;
  mpz_class p1 = p - 1, q1 = q - 1;
  mpz_lcm(ctx.lambda_.get_mpz_t(), p1.get_mpz_t(), q1.get_mpz_t());
  if (mpz_invert(ctx.mu_.get_mpz_t(), ctx.lambda_.get_mpz_t(), ctx.n_.get_mpz_t()) == 0) {
    throw ConfigError("paillier: lambda not invertible (degenerate primes)");
  }
  ctx.key_bits_ = bits;
  ctx.key_id_ = derive_seed(seed, "paillier-key", static_cast<std::uint64_t>(bits));
  return ctx;
}

Ciphertext Paillier::encrypt(const mpz_class& m, Rng& rng) const {
  mpz_class mm = m % n_;
  if (mm < 0) mm += n_;
  // r uniform in [1, n) with gcd(r, n) = 1; retry is vanishingly rare.
  mpz_class r, g;
  do {
    r = random_mpz_bits(rng, key_bits_ - 1);
    r %= n_;
    if (r == 0) r = 1;
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t());
  } while (g != 1);

  // (1+n)^m = 1 + m*n (mod n^2)
  mpz_class gm = (1 + mm * n_) % n2_;
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t(), n2_.get_mpz_t());
  Ciphertext c;
  c.value = (gm * rn) % n2_;
  c.scale_mult = 1;
  c.mag_bits = static_cast<int>(mpz_sizeinbase(m.get_mpz_t(), 2)) + 1;
  c.key_id = key_id_;
  return c;
}

mpz_class Paillier::decrypt(const Ciphertext& c) const {
  check(c);
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.value.get_mpz_t(), lambda_.get_mpz_t(), n2_.get_mpz_t());
  mpz_class l = (u - 1) / n_;
  mpz_class m = (l * mu_) % n_;
  if (m > n_ / 2) m -= n_;  // signed decode
  return m;
}

Ciphertext Paillier::add(const Ciphertext& a, const Ciphertext& b) const {
  check(a);
  check(b);
  if (a.scale_mult != b.scale_mult) {
    throw UsageError("paillier: adding ciphertexts with mismatched fixed-point scales");
  }
  Ciphertext out;
  out.value = (a.value * b.value) % n2_;
  out.scale_mult = a.scale_mult;
  out.mag_bits = std::max(a.mag_bits, b.mag_bits) + 1;
  out.key_id = key_id_;
  if (out.mag_bits >= key_bits_ - 1) {
    throw HeOverflowError("paillier: homomorphic sum exceeds the message space");
  }
  return out;
}

Ciphertext Paillier::scale_int(const mpz_class& k, const Ciphertext& c, int k_scale_mult) const {
  check(c);
  mpz_class kk = k;
  bool negate = false;
  if (kk < 0) {
    kk = -kk;
    negate = true;
  }
  Ciphertext out;
  mpz_powm(out.value.get_mpz_t(), c.value.get_mpz_t(), kk.get_mpz_t(), n2_.get_mpz_t());
  if (negate) {
    if (mpz_invert(out.value.get_mpz_t(), out.value.get_mpz_t(), n2_.get_mpz_t()) == 0) {
      throw TrainingError("paillier: ciphertext not invertible");
    }
  }
  out.scale_mult = c.scale_mult + k_scale_mult;
  out.mag_bits = c.mag_bits + (kk == 0 ? 1 : static_cast<int>(mpz_sizeinbase(kk.get_mpz_t(), 2)));
  out.key_id = key_id_;
  if (out.mag_bits >= key_bits_ - 1) {
    throw HeOverflowError("paillier: plaintext product exceeds the message space");
  }
  return out;
}

void Paillier::check(const Ciphertext& c) const {
  if (c.key_id != key_id_) throw UsageError("paillier: ciphertext from a different key");
}

std::vector<std::uint8_t> Paillier::serialize(const Ciphertext& c) const {
  check(c);
  std::vector<std::uint8_t> out(ciphertext_bytes(), 0);
  const std::size_t count = (mpz_sizeinbase(c.value.get_mpz_t(), 2) + 7) / 8;
  if (count > out.size()) throw TrainingError("paillier: ciphertext exceeds canonical width");
  // Big-endian, right-aligned in the fixed-width buffer.
  mpz_export(out.data() + (out.size() - count), nullptr, 1, 1, 1, 0, c.value.get_mpz_t());
  return out;
}

std::string Paillier::public_key_json() const {
  nlohmann::json j;
  j["format"] = "ppmarl-paillier-public";
  j["version"] = 1;
  j["bits"] = key_bits_;
  j["key_id"] = key_id_;
  j["n"] = n_.get_str(16);
  return j.dump();
}

std::string Paillier::secret_key_json() const {
  nlohmann::json j;
  j["format"] = "ppmarl-paillier-secret";
  j["version"] = 1;
  j["lambda"] = lambda_.get_str(16);
  j["mu"] = mu_.get_str(16);
  return j.dump();
}

Paillier Paillier::from_key_json(const std::string& pub, const std::string& sec) {
  const auto jp = nlohmann::json::parse(pub);
  const auto js = nlohmann::json::parse(sec);
  if (jp.value("format", "") != "ppmarl-paillier-public" ||
      js.value("format", "") != "ppmarl-paillier-secret") {
    throw DataError("paillier: bad key file format");
  }
  Paillier ctx;
  ctx.n_ = mpz_class(jp.at("n").get<std::string>(), 16);
  ctx.n2_ = ctx.n_ * ctx.n_;
  ctx.lambda_ = mpz_class(js.at("lambda").get<std::string>(), 16);
  ctx.mu_ = mpz_class(js.at("mu").get<std::string>(), 16);
  ctx.key_bits_ = jp.at("bits").get<int>();
  ctx.key_id_ = jp.at("key_id").get<std::uint64_t>();
  return ctx;
}

}  // namespace ppmarl
