#include "heda/bigint.hpp"

#include <random>

#include "heda/errors.hpp"

namespace heda {

namespace {

constexpr int kMillerRabinRounds = 64;

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

int b64_index(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '-') return 62;
  if (c == '_') return 63;
  return -1;
}

}  // namespace

Bigint powm(const Bigint& base, const Bigint& exp, const Bigint& mod) {
  if (exp < 0) throw RangeError("powm: negative exponent");
  Bigint out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

Bigint invmod(const Bigint& a, const Bigint& mod) {
  Bigint out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw RangeError("invmod: value not invertible modulo the given modulus");
  }
  return out;
}

std::vector<uint8_t> to_bytes_be(const Bigint& v, size_t width) {
  if (v < 0) throw RangeError("to_bytes_be: negative value");
  size_t need = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  if (v == 0) need = 0;
  if (need > width) throw RangeError("to_bytes_be: value wider than field");
  std::vector<uint8_t> out(width, 0);
  if (need > 0) {
    size_t written = 0;
    mpz_export(out.data() + (width - need), &written, 1, 1, 1, 0,
               v.get_mpz_t());
  }
  return out;
}

Bigint from_bytes_be(const uint8_t* data, size_t len) {
  Bigint out;
  if (len > 0) mpz_import(out.get_mpz_t(), len, 1, 1, 1, 0, data);
  return out;
}

std::string to_base64url(const Bigint& v) {
  size_t width = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  if (v == 0) width = 1;
  std::vector<uint8_t> bytes = to_bytes_be(v, width);
  std::string out;
  out.reserve((bytes.size() * 4 + 2) / 3);
  size_t i = 0;
  while (i + 3 <= bytes.size()) {
    uint32_t b = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kB64Alphabet[(b >> 18) & 63];
    out += kB64Alphabet[(b >> 12) & 63];
    out += kB64Alphabet[(b >> 6) & 63];
    out += kB64Alphabet[b & 63];
    i += 3;
  }
  size_t rest = bytes.size() - i;
  if (rest == 1) {
    uint32_t b = bytes[i] << 16;
    out += kB64Alphabet[(b >> 18) & 63];
    out += kB64Alphabet[(b >> 12) & 63];
  } else if (rest == 2) {
    uint32_t b = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kB64Alphabet[(b >> 18) & 63];
    out += kB64Alphabet[(b >> 12) & 63];
    out += kB64Alphabet[(b >> 6) & 63];
  }
  return out;
}

Bigint from_base64url(const std::string& s) {
  std::vector<uint8_t> bytes;
  bytes.reserve(s.size() * 3 / 4 + 1);
  uint32_t acc = 0;
  int nbits = 0;
  for (char c : s) {
    int v = b64_index(c);
    if (v < 0) throw ParseError("from_base64url: bad character");
    acc = (acc << 6) | static_cast<uint32_t>(v);
    nbits += 6;
    if (nbits >= 8) {
      nbits -= 8;
      bytes.push_back(static_cast<uint8_t>((acc >> nbits) & 0xff));
    }
  }
  return from_bytes_be(bytes.data(), bytes.size());
}

BigRng::BigRng() : state_(gmp_randinit_mt) {
  std::random_device rd;
  Bigint seed = 0;
  for (int i = 0; i < 4; ++i) {
    seed = (seed << 32) + Bigint(static_cast<unsigned long>(rd()));
  }
  state_.seed(seed);
}

BigRng::BigRng(uint64_t seed) : state_(gmp_randinit_mt) {
  Bigint s = (Bigint(static_cast<unsigned long>(seed >> 32)) << 32) +
             Bigint(static_cast<unsigned long>(seed & 0xffffffffULL));
  state_.seed(s);
}

Bigint BigRng::below(const Bigint& bound) {
  if (bound <= 0) throw RangeError("BigRng::below: bound must be positive");
  return state_.get_z_range(bound);
}

Bigint BigRng::bits(unsigned bits) { return state_.get_z_bits(bits); }

Bigint BigRng::prime(unsigned bits) {
  if (bits < 2) throw ParamError("BigRng::prime: need at least 2 bits");
  while (true) {
    Bigint c = this->bits(bits);
    mpz_setbit(c.get_mpz_t(), bits - 1);  // exact bit length
    mpz_setbit(c.get_mpz_t(), 0);         // odd
    if (is_probable_prime(c)) return c;
  }
}

uint64_t BigRng::u64() {
  Bigint v = state_.get_z_bits(64);
  return static_cast<uint64_t>(mpz_get_ui(v.get_mpz_t()));
}

double BigRng::real(double lo, double hi) {
  if (!(lo < hi)) throw RangeError("BigRng::real: empty interval");
  // 53 random bits give a uniform double in [0, 1).
  Bigint v = state_.get_z_bits(53);
  double unit = mpz_get_d(v.get_mpz_t()) / 9007199254740992.0;
  return lo + unit * (hi - lo);
}

bool is_probable_prime(const Bigint& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), kMillerRabinRounds) != 0;
}

}  // namespace heda
