#pragma once

#include <cstdint>
#include <vector>

#include "heda/crypto.hpp"
#include "heda/transport.hpp"

namespace heda {

// One endpoint of a two-party computation. Holds this side's full key
// material and only the public halves of the peer's keys.
struct Party {
  Role role = Role::kAlice;
  PaillierKey paillier;
  RsaKey rsa;
  PaillierPublicKey peer_paillier;
  RsaPublicKey peer_rsa;
};

// Generates fresh keypairs for one side; peer keys start empty.
Party make_party(Role role, unsigned paillier_bits, unsigned rsa_bits,
                 BigRng& rng);

// Installs each side's public keys as the other's peer keys.
void introduce(Party& a, Party& b);

// Serialized ciphertext width in bytes under a given key, so byte
// counts are a pure function of key size and message shape.
uint32_t paillier_wire_width(const PaillierPublicKey& pk);
uint32_t rsa_wire_width(const RsaPublicKey& pk);

// Pops the next message for `me` and checks it is the expected step.
Message expect_message(Transport& t, Role me, ProtocolId id, uint8_t step,
                       size_t item_count);

// The drivers below run both roles to completion over the transport, so
// the transcript records the real message sequence. Inputs are reals,
// fixed-point encoded at scale 1 unless noted; outputs land at Bob.

// Bob ends holding [[a + b]] under Alice's Paillier key. One send from
// Alice, no round trip.
std::vector<Ciphertext> secure_add(const Party& alice,
                                   const std::vector<double>& a,
                                   const Party& bob,
                                   const std::vector<double>& b, BigRng& rng,
                                   Transport& t);

// Bob ends holding [[a - b]]: the same exchange with b encoded as
// additive inverses.
std::vector<Ciphertext> secure_sub(const Party& alice,
                                   const std::vector<double>& a,
                                   const Party& bob,
                                   const std::vector<double>& b, BigRng& rng,
                                   Transport& t);

// Bob ends holding [[a . b]] at scale 2; his vector stays plaintext.
Ciphertext secure_dot(const Party& alice, const std::vector<double>& a,
                      const Party& bob, const std::vector<double>& b,
                      BigRng& rng, Transport& t);

// Bob ends holding ||a * b|| at scale 2 under Alice's RSA key. Zero has
// no multiplicative encoding and is rejected.
Ciphertext secure_mul(const Party& alice, double a, const Party& bob, double b,
                      Transport& t);

// Bob ends holding ||e^{a . b}|| under Alice's RSA key. Alice sends
// ||e^{a_i}|| componentwise; Bob's exponents must be nonnegative
// integers. The result scale is the sum of the exponents.
Ciphertext secure_pow(const Party& alice, const std::vector<double>& a,
                      const Party& bob, const std::vector<long>& b,
                      Transport& t);

// Converts Bob's ||v|| under Alice's RSA key into [[v]] under her
// Paillier key. Bob blinds multiplicatively with round(e^r Q) before
// Alice sees the value and unblinds with round(e^-r Q^2) after, so the
// result scale grows by 3. Exactly one round trip.
//
// r must be positive: r = 0 would hand Alice the exact value. The
// sampling overload draws r uniformly from [1, 2]; larger r would push
// the unblinding factor's quantization error past the codec tolerance.
Ciphertext convert_rsa_to_paillier(const Party& alice, const Party& bob,
                                   const Ciphertext& v, double r, BigRng& rng,
                                   Transport& t);
Ciphertext convert_rsa_to_paillier(const Party& alice, const Party& bob,
                                   const Ciphertext& v, BigRng& rng,
                                   Transport& t);

// Re-encrypts [[b]] from Alice's Paillier key to Bob's, preserving the
// signed plaintext and scale. bound_hint must bound the plaintext
// magnitude; the additive blind is drawn from [1, N_Alice / 2^80] and
// resampled until it exceeds 2^40 * bound_hint, so Alice sees b only
// behind at least 40 bits of statistical hiding. Exactly one round trip.
Ciphertext rekey_paillier(const Party& alice, const Party& bob,
                          const Ciphertext& b, const Bigint& bound_hint,
                          BigRng& rng, Transport& t);

// Uniform entry point for micro-benchmarks: runs one protocol on fresh
// inputs over a private transport and returns Bob's outputs plus the
// transcript. For the converting protocols the inputs are staged through
// the exponentiation protocol (id 6) or a direct encryption (id 7).
struct ProtocolRun {
  std::vector<Ciphertext> outputs;
  Transcript transcript;
};

ProtocolRun run_protocol(ProtocolId id, const Party& alice,
                         const std::vector<double>& a, const Party& bob,
                         const std::vector<double>& b, BigRng& rng);

}  // namespace heda
