#include "heda/fixed_point.hpp"

#include <cmath>
#include <limits>

#include "heda/errors.hpp"

namespace heda {

FixedPointCodec::FixedPointCodec(Bigint modulus) : n_(std::move(modulus)) {
  if (n_ < 4) throw ParamError("FixedPointCodec: modulus too small");
  half_ = n_ / 2;
}

Bigint FixedPointCodec::encode(double x, int scale_exp) const {
  if (!std::isfinite(x)) throw RangeError("fp encode: non-finite value");
  if (scale_exp < 0) throw RangeError("fp encode: negative scale");
  long double scaled = static_cast<long double>(x);
  for (int i = 0; i < scale_exp; ++i) scaled *= kQ;
  if (std::fabs(scaled) > 1e18L) {
    // Beyond both double-integer precision and any sane plaintext here.
    throw RangeError("fp encode: scaled magnitude too large");
  }
  long double r = std::nearbyint(scaled);  // round half to even
  Bigint mag(std::fabs(r) >= 1.0L ? static_cast<long>(std::fabs(r)) : 0L);
  if (mag >= half_) throw RangeError("fp encode: magnitude reaches N/2");
  if (r < 0.0L) return n_ - mag;
  return mag;
}

double FixedPointCodec::decode(const Bigint& v, int scale_exp) const {
  if (v < 0 || v >= n_) throw RangeError("fp decode: value outside Z_N");
  Bigint s = unwrap_signed(v);
  double out = mpz_get_d(s.get_mpz_t());
  if (!std::isfinite(out)) throw RangeError("fp decode: magnitude overflows");
  for (int i = 0; i < scale_exp; ++i) out /= kQ;
  return out;
}

long double FixedPointCodec::decode_ln(const Bigint& v, int scale_exp) const {
  if (v <= 0 || v >= half_) {
    throw RangeError("fp decode_ln: need a strictly positive value");
  }
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  long double ln = std::log(static_cast<long double>(mant)) +
                   static_cast<long double>(exp2) * 0.6931471805599453094L;
  return ln - static_cast<long double>(scale_exp) *
                  std::log(static_cast<long double>(kQ));
}

Bigint FixedPointCodec::wrap_signed(const Bigint& k) const {
  Bigint mag = abs(k);
  if (mag >= half_) throw RangeError("fp wrap: magnitude reaches N/2");
  if (k < 0) return n_ - mag;
  return mag;
}

Bigint FixedPointCodec::unwrap_signed(const Bigint& v) const {
  if (v > half_) return v - n_;
  return v;
}

Bigint q_pow(int e) {
  if (e < 0) throw RangeError("q_pow: negative exponent");
  Bigint out;
  mpz_ui_pow_ui(out.get_mpz_t(), FixedPointCodec::kQ, static_cast<unsigned long>(e));
  return out;
}

}  // namespace heda
