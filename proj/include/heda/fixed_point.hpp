#pragma once

#include "heda/bigint.hpp"

namespace heda {

// Decimal fixed-point codec over Z_N.
//
// A real v is stored as round(v * Q^scale_exp) with round-half-even;
// negative values map to the upper half of Z_N (v < 0 becomes N - |v|),
// with N/2 as the sign threshold. The scale exponent is tracked beside
// each value, never inside it: homomorphic addition requires equal
// scale exponents, multiplication adds them.
class FixedPointCodec {
 public:
  // Two decimal digits per scale step.
  static constexpr long kQ = 100;

  explicit FixedPointCodec(Bigint modulus);

  // round(x * Q^scale_exp) mapped into [0, N). Throws RangeError when the
  // magnitude reaches N/2 (the sign threshold would be ambiguous).
  Bigint encode(double x, int scale_exp = 1) const;

  // Inverse of encode for values whose magnitude fits in a double.
  double decode(const Bigint& v, int scale_exp = 1) const;

  // Natural log of a positive encoded value: ln(v) - scale_exp * ln(Q).
  // Usable when the decoded magnitude overflows double range.
  long double decode_ln(const Bigint& v, int scale_exp) const;

  // Map a signed integer into [0, N); |k| must stay below N/2.
  Bigint wrap_signed(const Bigint& k) const;

  // Signed representative in (-N/2, N/2].
  Bigint unwrap_signed(const Bigint& v) const;

  const Bigint& modulus() const { return n_; }

 private:
  Bigint n_;
  Bigint half_;  // floor(N / 2)
};

// Q^e as a big integer, e >= 0.
Bigint q_pow(int e);

}  // namespace heda
