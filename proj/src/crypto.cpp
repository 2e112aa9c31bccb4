#include "heda/crypto.hpp"

#include <cstdlib>

#include <json.hpp>

#include "heda/errors.hpp"

namespace heda {

namespace {

// Key identity is a fingerprint of (scheme, modulus) so that a key
// serialized and reloaded, or regenerated in another process, keeps
// recognizing its own ciphertexts.
uint64_t key_fingerprint(Scheme scheme, const Bigint& n) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  mix(static_cast<uint8_t>(scheme));
  size_t count = (mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8;
  std::vector<uint8_t> bytes = to_bytes_be(n, count);
  for (uint8_t b : bytes) mix(b);
  return h;
}

void check_operands(const Ciphertext& a, const Ciphertext& b, Scheme scheme,
                    uint64_t key_id) {
  if (a.scheme != scheme || b.scheme != scheme) {
    throw KeyMismatchError("ciphertext scheme mismatch");
  }
  if (a.key_id != key_id || b.key_id != key_id) {
    throw KeyMismatchError("ciphertexts under different keys");
  }
}

Bigint lcm(const Bigint& a, const Bigint& b) {
  Bigint out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

// L(u) = (u - 1) / n, defined on multiples-of-n-plus-one.
Bigint paillier_l(const Bigint& u, const Bigint& n) { return (u - 1) / n; }

nlohmann::json parse_key_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("key file: not a JSON object");
  }
  return j;
}

Bigint field_int(const nlohmann::json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_string()) {
    throw ParseError(std::string("key file: missing field ") + name);
  }
  return from_base64url(j[name].get<std::string>());
}

}  // namespace

PaillierKey paillier_keygen(unsigned bits, BigRng& rng) {
  if (bits < 256) throw ParamError("paillier_keygen: bits must be >= 256");
  if (bits % 2 != 0) throw ParamError("paillier_keygen: bits must be even");
  PaillierKey key;
  while (true) {
    key.p = rng.prime(bits / 2);
    key.q = rng.prime(bits / 2);
    if (key.p == key.q) continue;
    key.pub.n = key.p * key.q;
    if (mpz_sizeinbase(key.pub.n.get_mpz_t(), 2) == bits) break;
  }
  key.pub.n2 = key.pub.n * key.pub.n;
  key.pub.g = key.pub.n + 1;
  key.pub.bits = bits;
  key.pub.key_id = key_fingerprint(Scheme::kPaillier, key.pub.n);
  key.lambda = lcm(key.p - 1, key.q - 1);
  key.mu = invmod(key.lambda % key.pub.n, key.pub.n);
  return key;
}

Ciphertext paillier_encrypt(const PaillierPublicKey& pk, const Bigint& m,
                            BigRng& rng, int scale_exp) {
  if (m < 0 || m >= pk.n) throw RangeError("paillier_encrypt: m outside Z_N");
  Bigint r;
  do {
    r = rng.below(pk.n);
  } while (r == 0 || gcd(r, pk.n) != 1);
  // g = n + 1 gives g^m = 1 + m*n mod n^2 without an exponentiation.
  Bigint gm = (1 + m * pk.n) % pk.n2;
  Bigint c = (gm * powm(r, pk.n, pk.n2)) % pk.n2;
  return Ciphertext{c, Scheme::kPaillier, pk.key_id, scale_exp};
}

Bigint paillier_decrypt(const PaillierKey& key, const Ciphertext& c) {
  if (c.scheme != Scheme::kPaillier || c.key_id != key.pub.key_id) {
    throw KeyMismatchError("paillier_decrypt: wrong key for ciphertext");
  }
  if (c.value < 0 || c.value >= key.pub.n2) {
    throw RangeError("paillier_decrypt: ciphertext outside Z_{N^2}");
  }
  Bigint u = powm(c.value, key.lambda, key.pub.n2);
  return (paillier_l(u, key.pub.n) * key.mu) % key.pub.n;
}

Ciphertext paillier_add(const PaillierPublicKey& pk, const Ciphertext& a,
                        const Ciphertext& b) {
  check_operands(a, b, Scheme::kPaillier, pk.key_id);
  if (a.scale_exp != b.scale_exp) {
    throw ScaleMismatchError("paillier_add: scale exponents differ");
  }
  return Ciphertext{(a.value * b.value) % pk.n2, Scheme::kPaillier, pk.key_id,
                    a.scale_exp};
}

Ciphertext paillier_scalar_mul(const PaillierPublicKey& pk,
                               const Ciphertext& c, const Bigint& k,
                               int k_scale) {
  if (c.scheme != Scheme::kPaillier || c.key_id != pk.key_id) {
    throw KeyMismatchError("paillier_scalar_mul: wrong key for ciphertext");
  }
  Bigint e = k % pk.n;
  if (e < 0) e += pk.n;
  return Ciphertext{powm(c.value, e, pk.n2), Scheme::kPaillier, pk.key_id,
                    c.scale_exp + k_scale};
}

RsaKey rsa_keygen(unsigned bits, BigRng& rng) {
  if (bits < 256) throw ParamError("rsa_keygen: bits must be >= 256");
  if (bits % 2 != 0) throw ParamError("rsa_keygen: bits must be even");
  RsaKey key;
  key.pub.e = 65537;
  while (true) {
    key.p = rng.prime(bits / 2);
    key.q = rng.prime(bits / 2);
    if (key.p == key.q) continue;
    key.pub.n = key.p * key.q;
    if (mpz_sizeinbase(key.pub.n.get_mpz_t(), 2) != bits) continue;
    Bigint lam = lcm(key.p - 1, key.q - 1);
    if (gcd(key.pub.e, lam) != 1) continue;
    key.d = invmod(key.pub.e, lam);
    break;
  }
  key.pub.bits = bits;
  key.pub.key_id = key_fingerprint(Scheme::kRsa, key.pub.n);
  return key;
}

Ciphertext rsa_encrypt(const RsaPublicKey& pk, const Bigint& m,
                       int scale_exp) {
  if (m <= 0 || m >= pk.n) throw RangeError("rsa_encrypt: m outside [1, n)");
  if (gcd(m, pk.n) != 1) {
    throw RangeError("rsa_encrypt: m shares a factor with n");
  }
  return Ciphertext{powm(m, pk.e, pk.n), Scheme::kRsa, pk.key_id, scale_exp};
}

Bigint rsa_decrypt(const RsaKey& key, const Ciphertext& c) {
  if (c.scheme != Scheme::kRsa || c.key_id != key.pub.key_id) {
    throw KeyMismatchError("rsa_decrypt: wrong key for ciphertext");
  }
  if (c.value < 0 || c.value >= key.pub.n) {
    throw RangeError("rsa_decrypt: ciphertext outside Z_N");
  }
  return powm(c.value, key.d, key.pub.n);
}

Ciphertext rsa_mul(const RsaPublicKey& pk, const Ciphertext& a,
                   const Ciphertext& b) {
  check_operands(a, b, Scheme::kRsa, pk.key_id);
  return Ciphertext{(a.value * b.value) % pk.n, Scheme::kRsa, pk.key_id,
                    a.scale_exp + b.scale_exp};
}

Ciphertext rsa_pow(const RsaPublicKey& pk, const Ciphertext& c,
                   const Bigint& k) {
  if (c.scheme != Scheme::kRsa || c.key_id != pk.key_id) {
    throw KeyMismatchError("rsa_pow: wrong key for ciphertext");
  }
  if (k < 0) throw RangeError("rsa_pow: negative exponent");
  if (!k.fits_slong_p()) throw RangeError("rsa_pow: exponent too large");
  long k_long = k.get_si();
  long new_scale = 0;
  if (k_long != 0) {
    if (std::abs(static_cast<long>(c.scale_exp)) > 2147483647L / k_long) {
      throw RangeError("rsa_pow: scale exponent would overflow");
    }
    new_scale = static_cast<long>(c.scale_exp) * k_long;
  }
  return Ciphertext{powm(c.value, k, pk.n), Scheme::kRsa, pk.key_id,
                    static_cast<int>(new_scale)};
}

std::string paillier_key_to_json(const PaillierKey& key, bool include_secret) {
  nlohmann::json j;
  j["scheme"] = "paillier";
  j["bits"] = key.pub.bits;
  j["n"] = to_base64url(key.pub.n);
  j["g"] = to_base64url(key.pub.g);
  if (include_secret) {
    j["p"] = to_base64url(key.p);
    j["q"] = to_base64url(key.q);
  }
  return j.dump(2) + "\n";
}

std::string rsa_key_to_json(const RsaKey& key, bool include_secret) {
  nlohmann::json j;
  j["scheme"] = "rsa";
  j["bits"] = key.pub.bits;
  j["n"] = to_base64url(key.pub.n);
  j["e"] = to_base64url(key.pub.e);
  if (include_secret) {
    j["d"] = to_base64url(key.d);
    j["p"] = to_base64url(key.p);
    j["q"] = to_base64url(key.q);
  }
  return j.dump(2) + "\n";
}

PaillierKey paillier_key_from_json(const std::string& text) {
  nlohmann::json j = parse_key_json(text);
  if (j.value("scheme", "") != "paillier") {
    throw ParamError("key file: not a paillier key");
  }
  PaillierKey key;
  key.pub.n = field_int(j, "n");
  key.pub.g = field_int(j, "g");
  key.pub.n2 = key.pub.n * key.pub.n;
  key.pub.bits = j.value("bits", 0u);
  key.pub.key_id = key_fingerprint(Scheme::kPaillier, key.pub.n);
  if (j.contains("p") && j.contains("q")) {
    key.p = field_int(j, "p");
    key.q = field_int(j, "q");
    if (key.p * key.q != key.pub.n) {
      throw ParseError("key file: p*q does not match n");
    }
    key.lambda = lcm(key.p - 1, key.q - 1);
    key.mu = invmod(key.lambda % key.pub.n, key.pub.n);
  }
  return key;
}

RsaKey rsa_key_from_json(const std::string& text) {
  nlohmann::json j = parse_key_json(text);
  if (j.value("scheme", "") != "rsa") {
    throw ParamError("key file: not an rsa key");
  }
  RsaKey key;
  key.pub.n = field_int(j, "n");
  key.pub.e = field_int(j, "e");
  key.pub.bits = j.value("bits", 0u);
  key.pub.key_id = key_fingerprint(Scheme::kRsa, key.pub.n);
  if (j.contains("d")) key.d = field_int(j, "d");
  if (j.contains("p") && j.contains("q")) {
    key.p = field_int(j, "p");
    key.q = field_int(j, "q");
    if (key.p * key.q != key.pub.n) {
      throw ParseError("key file: p*q does not match n");
    }
  }
  return key;
}

std::string key_file_scheme(const std::string& text) {
  nlohmann::json j = parse_key_json(text);
  std::string s = j.value("scheme", "");
  if (s != "paillier" && s != "rsa") {
    throw ParseError("key file: unknown scheme tag");
  }
  return s;
}

}  // namespace heda
