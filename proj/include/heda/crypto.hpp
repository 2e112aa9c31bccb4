#pragma once

#include <cstdint>
#include <string>

#include "heda/bigint.hpp"
#include "heda/fixed_point.hpp"

namespace heda {

enum class Scheme : uint8_t { kPaillier = 1, kRsa = 2 };

// A ciphertext plus the bookkeeping needed to combine it safely:
// the scheme, the key it was produced under, and the fixed-point
// scale exponent of its plaintext.
struct Ciphertext {
  Bigint value;
  Scheme scheme = Scheme::kPaillier;
  uint64_t key_id = 0;
  int scale_exp = 0;
};

// ---------------------------------------------------------------------------
// Paillier: additively homomorphic, plaintexts in Z_N, ciphertexts in Z_{N^2}.

struct PaillierPublicKey {
  Bigint n;
  Bigint n2;  // n^2, cached
  Bigint g;   // fixed to n + 1
  unsigned bits = 0;
  uint64_t key_id = 0;
};

struct PaillierKey {
  PaillierPublicKey pub;
  Bigint p;
  Bigint q;
  Bigint lambda;  // lcm(p-1, q-1)
  Bigint mu;      // lambda^-1 mod n
};

// Generates an n of exactly `bits` bits from two random primes; bits >= 256.
PaillierKey paillier_keygen(unsigned bits, BigRng& rng);

// m must lie in [0, n). Fresh randomness per call.
Ciphertext paillier_encrypt(const PaillierPublicKey& pk, const Bigint& m,
                            BigRng& rng, int scale_exp = 0);

Bigint paillier_decrypt(const PaillierKey& key, const Ciphertext& c);

// [[a + b mod n]]; requires same key and equal scale exponents.
Ciphertext paillier_add(const PaillierPublicKey& pk, const Ciphertext& a,
                        const Ciphertext& b);

// [[k * m mod n]]; k may be negative (reduced mod n). When k is an encoded
// real, pass its scale so the ledger tracks the product's scale.
Ciphertext paillier_scalar_mul(const PaillierPublicKey& pk,
                               const Ciphertext& c, const Bigint& k,
                               int k_scale = 0);

// ---------------------------------------------------------------------------
// Textbook RSA: multiplicatively homomorphic, deterministic, unpadded.
// That determinism is what the exponentiation protocol exploits; it is
// also why this scheme must never be used as a general-purpose cipher.

struct RsaPublicKey {
  Bigint n;
  Bigint e;
  unsigned bits = 0;
  uint64_t key_id = 0;
};

struct RsaKey {
  RsaPublicKey pub;
  Bigint d;
  Bigint p;
  Bigint q;
};

RsaKey rsa_keygen(unsigned bits, BigRng& rng);

// m must lie in [1, n) and be coprime to n.
Ciphertext rsa_encrypt(const RsaPublicKey& pk, const Bigint& m,
                       int scale_exp = 0);

Bigint rsa_decrypt(const RsaKey& key, const Ciphertext& c);

// ||a * b mod n||; scale exponents add.
Ciphertext rsa_mul(const RsaPublicKey& pk, const Ciphertext& a,
                   const Ciphertext& b);

// ||m^k mod n|| via square-and-multiply; k >= 0. k = 0 yields the
// deterministic encryption of 1. The scale exponent multiplies by k.
Ciphertext rsa_pow(const RsaPublicKey& pk, const Ciphertext& c,
                   const Bigint& k);

// ---------------------------------------------------------------------------
// Key file serialization: JSON with base64url big-endian integer fields.

std::string paillier_key_to_json(const PaillierKey& key, bool include_secret);
std::string rsa_key_to_json(const RsaKey& key, bool include_secret);

// Load either scheme; throws ParseError on malformed input and ParamError
// when `text` holds the other scheme.
PaillierKey paillier_key_from_json(const std::string& text);
RsaKey rsa_key_from_json(const std::string& text);

// Scheme tag inside a key file, "paillier" or "rsa".
std::string key_file_scheme(const std::string& text);

}  // namespace heda
