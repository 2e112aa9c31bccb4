#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace heda {

using Bigint = mpz_class;

// Modular exponentiation base^exp mod mod; exp must be non-negative.
Bigint powm(const Bigint& base, const Bigint& exp, const Bigint& mod);

// Modular inverse; throws RangeError when gcd(a, mod) != 1.
Bigint invmod(const Bigint& a, const Bigint& mod);

// Big-endian byte export padded on the left with zeros to `width` bytes.
// Throws RangeError if the value needs more than `width` bytes.
std::vector<uint8_t> to_bytes_be(const Bigint& v, size_t width);

Bigint from_bytes_be(const uint8_t* data, size_t len);

// base64url (RFC 4648 section 5, unpadded) of the minimal big-endian encoding.
std::string to_base64url(const Bigint& v);
Bigint from_base64url(const std::string& s);

// Deterministic big integer source used for key generation and blinding.
// Seeded construction gives reproducible streams for tests; the default
// constructor seeds from the OS entropy pool.
class BigRng {
 public:
  BigRng();
  explicit BigRng(uint64_t seed);

  // Uniform in [0, bound).
  Bigint below(const Bigint& bound);
  // Uniform with exactly `bits` random bits (value < 2^bits).
  Bigint bits(unsigned bits);
  // Random prime with exactly `bits` bits (top bit set), Miller-Rabin
  // checked with at least 64 rounds.
  Bigint prime(unsigned bits);

  uint64_t u64();
  // Uniform real in [lo, hi).
  double real(double lo, double hi);

 private:
  gmp_randclass state_;
};

// Miller-Rabin based primality check, at least 64 rounds.
bool is_probable_prime(const Bigint& n);

}  // namespace heda
