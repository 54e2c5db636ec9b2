#pragma once

#include <span>
#include <vector>

#include "ppmarl/marl/bus.hpp"
#include "ppmarl/nn/mlp.hpp"
#include "ppmarl/privacy/fixed_point.hpp"
#include "ppmarl/privacy/paillier.hpp"

namespace ppmarl {

// Raised when an accumulated fixed-point scale no longer fits the Paillier
// message space.
class HeOverflowError : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

// he1: arbitrary hidden activations via decrypt-activate-reencrypt roundtrips
//      with the secret-key holder.
// he2: no mid-network interaction; requires linear hidden activations.
enum class HeMode { he1, he2 };

const char* to_string(HeMode m);

std::vector<Ciphertext> he_encrypt_vector(const Vec& x, const Paillier& ctx,
                                          const FixedPointCodec& codec, Rng& rng,
                                          OpCounters* ops = nullptr);

Vec he_decrypt_vector(std::span<const Ciphertext> c, const Paillier& ctx,
                      const FixedPointCodec& codec, OpCounters* ops = nullptr);

// out_j = sum_i w_ji * in_i + b_j under encryption (plaintext weights).
// The output scale is the input scale + 1; throws HeOverflowError when the
// accumulated scale exceeds the message space.
std::vector<Ciphertext> he_linear_layer(const Mat& w, const Vec& b,
                                        std::span<const Ciphertext> in, const Paillier& ctx,
                                        const FixedPointCodec& codec, OpCounters* ops = nullptr);

// Decrypt, apply the activation in plaintext at the keyholder, re-encrypt at
// base scale. Optionally reports the decoded pre-activations.
std::vector<Ciphertext> interactive_activation(std::span<const Ciphertext> in, Activation act,
                                               const Paillier& keyholder,
                                               const FixedPointCodec& codec, Rng& rng,
                                               OpCounters* ops = nullptr,
                                               Vec* decoded_pre = nullptr);

struct HeBatchResult {
  Vec outputs;                       // decoded Q per batch element
  std::vector<ForwardTape> tapes;    // keyholder-side tapes (when requested)
  int activation_roundtrips = 0;     // mid-network interaction rounds
};

// Coordinator-side evaluation of the global critic over encrypted q batches,
// with the keyholder (a trusted agent holding the secret key) performing
// activations and final decryption. All exchanges are recorded on the bus.
class HeGlobalCritic {
 public:
  HeGlobalCritic(HeMode mode, const Paillier& ctx, FixedPointCodec codec, int keyholder_id,
                 MessageBus* bus);

  // he2 requires every hidden activation to be linear.
  void check_net(const Mlp& net) const;

  std::vector<Ciphertext> encrypt_q(const Vec& q, Rng& rng) const;

  // One protocol round over a batch of encrypted inputs. Layers are processed
  // batch-synchronously, so he1 performs exactly one interaction round per
  // nonlinear hidden layer regardless of batch size. When want_tapes is set
  // the inputs are forwarded to the keyholder, which rebuilds the activation
  // cache for backward.
  HeBatchResult forward_batch(const Mlp& net, const std::vector<std::vector<Ciphertext>>& enc_q,
                              Rng& rng, bool want_tapes);

  HeMode mode() const { return mode_; }
  const Paillier& context() const { return ctx_; }
  const FixedPointCodec& codec() const { return codec_; }
  int keyholder_id() const { return keyholder_id_; }

 private:
  OpCounters* ops() const;

  HeMode mode_;
  const Paillier& ctx_;
  FixedPointCodec codec_;
  int keyholder_id_;
  MessageBus* bus_;
};

}  // namespace ppmarl
