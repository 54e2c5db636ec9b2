#include "ppmarl/privacy/he_critic.hpp"

#include <cmath>

namespace ppmarl {

const char* to_string(HeMode m) { return m == HeMode::he1 ? "he1" : "he2"; }

std::vector<Ciphertext> he_encrypt_vector(const Vec& x, const Paillier& ctx,
                                          const FixedPointCodec& codec, Rng& rng,
                                          OpCounters* ops) {
  std::vector<Ciphertext> out;
  out.reserve(x.size());
  for (double v : x) {
    out.push_back(ctx.encrypt(codec.encode(v), rng));
    if (ops) ++ops->he_encrypt;
  }
  return out;
}

Vec he_decrypt_vector(std::span<const Ciphertext> c, const Paillier& ctx,
                      const FixedPointCodec& codec, OpCounters* ops) {
  Vec out;
  out.reserve(c.size());
  for (const auto& ct : c) {
    out.push_back(codec.decode(ctx.decrypt(ct), ct.scale_mult));
    if (ops) ++ops->he_decrypt;
  }
  return out;
}

std::vector<Ciphertext> he_linear_layer(const Mat& w, const Vec& b,
                                        std::span<const Ciphertext> in, const Paillier& ctx,
                                        const FixedPointCodec& codec, OpCounters* ops) {
  if (in.size() != w.cols || b.size() != w.rows) {
    throw UsageError("he_linear_layer: dimension mismatch");
  }
  if (in.empty()) throw UsageError("he_linear_layer: empty input");
  const int in_scale = in[0].scale_mult;
  for (const auto& c : in) {
    if (c.scale_mult != in_scale) throw UsageError("he_linear_layer: mixed input scales");
  }
  const int out_scale = in_scale + 1;

  std::vector<Ciphertext> out;
  out.reserve(w.rows);
  // Bias enters as a trivial encryption (r = 1); the bias is public so the
  // missing randomness leaks nothing, and every output row still carries the
  // randomness of its input ciphertexts.
  for (std::size_t r = 0; r < w.rows; ++r) {
    mpz_class bias_m = codec.encode(b[r], out_scale);
    mpz_class bm = bias_m % ctx.n();
    if (bm < 0) bm += ctx.n();
    Ciphertext acc;
    acc.value = (1 + bm * ctx.n()) % (ctx.n() * ctx.n());
    acc.scale_mult = out_scale;
    acc.mag_bits = codec.value_bits(out_scale);
    acc.key_id = ctx.key_id();
    for (std::size_t c = 0; c < w.cols; ++c) {
      const Ciphertext term = ctx.scale_int(codec.encode(w.at(r, c)), in[c]);
      if (ops) ++ops->he_scale;
      acc = ctx.add(acc, term);
      if (ops) ++ops->he_add;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<Ciphertext> interactive_activation(std::span<const Ciphertext> in, Activation act,
                                               const Paillier& keyholder,
                                               const FixedPointCodec& codec, Rng& rng,
                                               OpCounters* ops, Vec* decoded_pre) {
  Vec z = he_decrypt_vector(in, keyholder, codec, ops);
  if (decoded_pre) *decoded_pre = z;
  Vec a(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    switch (act) {
      case Activation::linear: a[i] = z[i]; break;
      case Activation::relu: a[i] = z[i] > 0.0 ? z[i] : 0.0; break;
      case Activation::tanh: a[i] = std::tanh(z[i]); break;
      case Activation::square: a[i] = z[i] * z[i]; break;
    }
  }
  return he_encrypt_vector(a, keyholder, codec, rng, ops);
}

HeGlobalCritic::HeGlobalCritic(HeMode mode, const Paillier& ctx, FixedPointCodec codec,
                               int keyholder_id, MessageBus* bus)
    : mode_(mode), ctx_(ctx), codec_(codec), keyholder_id_(keyholder_id), bus_(bus) {}

void HeGlobalCritic::check_net(const Mlp& net) const {
  if (net.layers.empty()) throw ConfigError("he critic: empty network");
  if (mode_ == HeMode::he2) {
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
      if (net.layers[l].act != Activation::linear) {
        throw ConfigError("he2 requires linear hidden activations in the global critic");
      }
    }
  }
  if (net.layers.back().act != Activation::linear) {
    throw ConfigError("he critic: final activation must be linear");
  }
}

OpCounters* HeGlobalCritic::ops() const { return bus_ ? &bus_->ops() : nullptr; }

std::vector<Ciphertext> HeGlobalCritic::encrypt_q(const Vec& q, Rng& rng) const {
  return he_encrypt_vector(q, ctx_, codec_, rng, ops());
}

HeBatchResult HeGlobalCritic::forward_batch(const Mlp& net,
                                            const std::vector<std::vector<Ciphertext>>& enc_q,
                                            Rng& rng, bool want_tapes) {
  check_net(net);
  const std::size_t batch = enc_q.size();
  if (batch == 0) throw UsageError("he critic: empty batch");
  const std::size_t cipher_bytes = ctx_.ciphertext_bytes();

  HeBatchResult result;

  // With tapes requested, the keyholder also receives the input ciphertexts
  // and rebuilds the activation cache by a plaintext recompute on the decoded
  // inputs; gradients then refer to the quantized values actually used.
  if (want_tapes) {
    if (bus_) {
      bus_->send(MsgKind::cipher_blob, kCoordinator, keyholder_id_,
                 Payload{.blob_bytes = batch * enc_q[0].size() * cipher_bytes});
    }
    result.tapes.resize(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      const Vec q_decoded = he_decrypt_vector(enc_q[b], ctx_, codec_, ops());
      forward(net, q_decoded, &result.tapes[b]);
    }
  }

  std::vector<std::vector<Ciphertext>> x = enc_q;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    for (std::size_t b = 0; b < batch; ++b) {
      x[b] = he_linear_layer(layer.weights, layer.bias, x[b], ctx_, codec_, ops());
    }
    const bool is_last = (l + 1 == net.layers.size());
    if (is_last) break;
    if (layer.act == Activation::linear) continue;  // scale keeps growing
    if (mode_ == HeMode::he2) {
      throw ConfigError("he2 requires linear hidden activations in the global critic");
    }
    // One batched interaction round: ciphertexts to the keyholder and fresh
    // encryptions back.
    const std::uint64_t roundtrip_bytes = batch * layer.bias.size() * cipher_bytes;
    if (bus_) {
      bus_->send(MsgKind::activation_roundtrip, kCoordinator, keyholder_id_,
                 Payload{.blob_bytes = roundtrip_bytes});
      bus_->send(MsgKind::activation_roundtrip, keyholder_id_, kCoordinator,
                 Payload{.blob_bytes = roundtrip_bytes});
      bus_->record_interaction_round();
    }
    ++result.activation_roundtrips;
    for (std::size_t b = 0; b < batch; ++b) {
      x[b] = interactive_activation(x[b], layer.act, ctx_, codec_, rng, ops());
    }
  }

  // Final decrypt at the keyholder; the scalar comes back in plaintext.
  if (bus_) {
    bus_->send(MsgKind::cipher_blob, kCoordinator, keyholder_id_,
               Payload{.blob_bytes = batch * cipher_bytes});
  }
  result.outputs.resize(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    if (x[b].size() != 1) throw UsageError("he critic: global critic output must be scalar");
    result.outputs[b] = he_decrypt_vector(x[b], ctx_, codec_, ops())[0];
  }
  if (bus_) {
    Payload up;
    up.values = result.outputs;
    bus_->send(MsgKind::cipher_blob, keyholder_id_, kCoordinator, std::move(up));
  }
  return result;
}

}  // namespace ppmarl
