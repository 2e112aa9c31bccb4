#include "heda/protocols.hpp"

#include <cmath>
#include <utility>

#include "heda/errors.hpp"
#include "heda/fixed_point.hpp"

namespace heda {

namespace {

Message begin_message(ProtocolId id, uint8_t step, Role sender) {
  Message m;
  m.protocol_id = id;
  m.step = step;
  m.sender = sender;
  return m;
}

// The drivers run both roles, so they can catch a miswired pair before
// any ciphertext algebra produces garbage.
void require_introduced(const Party& alice, const Party& bob) {
  if (bob.peer_paillier.key_id != alice.paillier.pub.key_id ||
      bob.peer_rsa.key_id != alice.rsa.pub.key_id) {
    throw KeyMismatchError("protocol: parties have not exchanged public keys");
  }
}

// Alice-side opening move shared by the Paillier protocols: encrypt the
// vector at scale 1 under her own key and send it.
void send_paillier_vector(const Party& alice, const std::vector<double>& a,
                          ProtocolId id, BigRng& rng, Transport& t) {
  const PaillierPublicKey& pk = alice.paillier.pub;
  FixedPointCodec codec(pk.n);
  Message m = begin_message(id, 0, Role::kAlice);
  uint32_t width = paillier_wire_width(pk);
  m.items.reserve(a.size());
  for (double x : a) {
    Ciphertext c = paillier_encrypt(pk, codec.encode(x, 1), rng, 1);
    m.items.push_back({std::move(c.value), width});
  }
  t.send(std::move(m));
}

}  // namespace

Party make_party(Role role, unsigned paillier_bits, unsigned rsa_bits,
                 BigRng& rng) {
  Party p;
  p.role = role;
  p.paillier = paillier_keygen(paillier_bits, rng);
  p.rsa = rsa_keygen(rsa_bits, rng);
  return p;
}

void introduce(Party& a, Party& b) {
  a.peer_paillier = b.paillier.pub;
  a.peer_rsa = b.rsa.pub;
  b.peer_paillier = a.paillier.pub;
  b.peer_rsa = a.rsa.pub;
}

uint32_t paillier_wire_width(const PaillierPublicKey& pk) {
  return (2 * pk.bits + 7) / 8;
}

uint32_t rsa_wire_width(const RsaPublicKey& pk) { return (pk.bits + 7) / 8; }

Message expect_message(Transport& t, Role me, ProtocolId id, uint8_t step,
                       size_t item_count) {
  Message m = t.receive(me);
  if (m.protocol_id != id || m.step != step) {
    throw ParseError("protocol: unexpected message id or step");
  }
  if (m.items.size() != item_count) {
    throw ParseError("protocol: unexpected item count");
  }
  return m;
}

std::vector<Ciphertext> secure_add(const Party& alice,
                                   const std::vector<double>& a,
                                   const Party& bob,
                                   const std::vector<double>& b, BigRng& rng,
                                   Transport& t) {
  if (a.empty() || a.size() != b.size()) {
    throw DimensionError("secure_add: vectors must have equal nonzero length");
  }
  require_introduced(alice, bob);
  send_paillier_vector(alice, a, ProtocolId::kSecureAdd, rng, t);

  Message m =
      expect_message(t, Role::kBob, ProtocolId::kSecureAdd, 0, a.size());
  const PaillierPublicKey& pk = bob.peer_paillier;
  FixedPointCodec codec(pk.n);
  std::vector<Ciphertext> out;
  out.reserve(b.size());
  for (size_t i = 0; i < b.size(); ++i) {
    Ciphertext ai{m.items[i].value, Scheme::kPaillier, pk.key_id, 1};
    Ciphertext bi = paillier_encrypt(pk, codec.encode(b[i], 1), rng, 1);
    out.push_back(paillier_add(pk, ai, bi));
  }
  return out;
}

std::vector<Ciphertext> secure_sub(const Party& alice,
                                   const std::vector<double>& a,
                                   const Party& bob,
                                   const std::vector<double>& b, BigRng& rng,
                                   Transport& t) {
  if (a.empty() || a.size() != b.size()) {
    throw DimensionError("secure_sub: vectors must have equal nonzero length");
  }
  require_introduced(alice, bob);
  send_paillier_vector(alice, a, ProtocolId::kSecureSub, rng, t);

  Message m =
      expect_message(t, Role::kBob, ProtocolId::kSecureSub, 0, a.size());
  const PaillierPublicKey& pk = bob.peer_paillier;
  FixedPointCodec codec(pk.n);
  std::vector<Ciphertext> out;
  out.reserve(b.size());
  for (size_t i = 0; i < b.size(); ++i) {
    Ciphertext ai{m.items[i].value, Scheme::kPaillier, pk.key_id, 1};
    Ciphertext bi = paillier_encrypt(pk, codec.encode(-b[i], 1), rng, 1);
    out.push_back(paillier_add(pk, ai, bi));
  }
  return out;
}

Ciphertext secure_dot(const Party& alice, const std::vector<double>& a,
                      const Party& bob, const std::vector<double>& b,
                      BigRng& rng, Transport& t) {
  if (a.empty() || a.size() != b.size()) {
    throw DimensionError("secure_dot: vectors must have equal nonzero length");
  }
  require_introduced(alice, bob);
  send_paillier_vector(alice, a, ProtocolId::kSecureDot, rng, t);

  Message m =
      expect_message(t, Role::kBob, ProtocolId::kSecureDot, 0, a.size());
  const PaillierPublicKey& pk = bob.peer_paillier;
  FixedPointCodec codec(pk.n);
  Ciphertext acc;
  for (size_t i = 0; i < b.size(); ++i) {
    Ciphertext ai{m.items[i].value, Scheme::kPaillier, pk.key_id, 1};
    Ciphertext term = paillier_scalar_mul(pk, ai, codec.encode(b[i], 1), 1);
    acc = (i == 0) ? term : paillier_add(pk, acc, term);
  }
  return acc;
}

Ciphertext secure_mul(const Party& alice, double a, const Party& bob, double b,
                      Transport& t) {
  require_introduced(alice, bob);
  const RsaPublicKey& apk = alice.rsa.pub;
  Bigint ma = FixedPointCodec(apk.n).encode(a, 1);
  if (ma == 0) {
    throw ParamError("secure_mul: zero has no multiplicative encoding");
  }
  Ciphertext ca = rsa_encrypt(apk, ma, 1);
  Message m = begin_message(ProtocolId::kSecureMul, 0, Role::kAlice);
  m.items.push_back({std::move(ca.value), rsa_wire_width(apk)});
  t.send(std::move(m));

  Message r = expect_message(t, Role::kBob, ProtocolId::kSecureMul, 0, 1);
  const RsaPublicKey& pk = bob.peer_rsa;
  Bigint mb = FixedPointCodec(pk.n).encode(b, 1);
  if (mb == 0) {
    throw ParamError("secure_mul: zero has no multiplicative encoding");
  }
  Ciphertext received{r.items[0].value, Scheme::kRsa, pk.key_id, 1};
  return rsa_mul(pk, received, rsa_encrypt(pk, mb, 1));
}

Ciphertext secure_pow(const Party& alice, const std::vector<double>& a,
                      const Party& bob, const std::vector<long>& b,
                      Transport& t) {
  if (a.empty() || a.size() != b.size()) {
    throw DimensionError("secure_pow: vectors must have equal nonzero length");
  }
  for (long k : b) {
    if (k < 0) {
      throw RangeError(
          "secure_pow: exponents must be nonnegative; split negative parts "
          "before calling");
    }
  }
  require_introduced(alice, bob);

  const RsaPublicKey& apk = alice.rsa.pub;
  FixedPointCodec codec(apk.n);
  Message m = begin_message(ProtocolId::kSecurePow, 0, Role::kAlice);
  uint32_t width = rsa_wire_width(apk);
  m.items.reserve(a.size());
  for (double x : a) {
    Bigint base = codec.encode(std::exp(x), 1);
    if (base == 0) {
      throw RangeError("secure_pow: e^a rounds to zero at this scale");
    }
    Ciphertext c = rsa_encrypt(apk, base, 1);
    m.items.push_back({std::move(c.value), width});
  }
  t.send(std::move(m));

  Message r =
      expect_message(t, Role::kBob, ProtocolId::kSecurePow, 0, a.size());
  const RsaPublicKey& pk = bob.peer_rsa;
  Ciphertext acc;
  for (size_t i = 0; i < b.size(); ++i) {
    Ciphertext base{r.items[i].value, Scheme::kRsa, pk.key_id, 1};
    Ciphertext powed = rsa_pow(pk, base, Bigint(b[i]));
    acc = (i == 0) ? powed : rsa_mul(pk, acc, powed);
  }
  return acc;
}

Ciphertext convert_rsa_to_paillier(const Party& alice, const Party& bob,
                                   const Ciphertext& v, double r, BigRng& rng,
                                   Transport& t) {
  require_introduced(alice, bob);
  if (v.scheme != Scheme::kRsa) {
    throw ParamError("convert: expected an RSA ciphertext");
  }
  if (v.key_id != bob.peer_rsa.key_id) {
    throw KeyMismatchError("convert: ciphertext is not under the peer's key");
  }
  if (!(r > 0.0)) {
    throw ParamError("convert: blinding exponent must be positive");
  }

  const RsaPublicKey& rpk = bob.peer_rsa;
  Bigint blind = FixedPointCodec(rpk.n).encode(std::exp(r), 1);
  Ciphertext blinded = rsa_mul(rpk, v, rsa_encrypt(rpk, blind, 1));
  Message m0 = begin_message(ProtocolId::kConvert, 0, Role::kBob);
  m0.items.push_back({std::move(blinded.value), rsa_wire_width(rpk)});
  t.send(std::move(m0));

  Message ma = expect_message(t, Role::kAlice, ProtocolId::kConvert, 0, 1);
  Ciphertext held{ma.items[0].value, Scheme::kRsa, alice.rsa.pub.key_id, 0};
  Bigint w = rsa_decrypt(alice.rsa, held);
  if (w >= alice.paillier.pub.n / 2) {
    throw RangeError("convert: blinded value exceeds the signed range");
  }
  Ciphertext pa = paillier_encrypt(alice.paillier.pub, w, rng, 0);
  Message m1 = begin_message(ProtocolId::kConvert, 1, Role::kAlice);
  m1.items.push_back(
      {std::move(pa.value), paillier_wire_width(alice.paillier.pub)});
  t.send(std::move(m1));

  Message mb = expect_message(t, Role::kBob, ProtocolId::kConvert, 1, 1);
  const PaillierPublicKey& ppk = bob.peer_paillier;
  Bigint unblind = FixedPointCodec(ppk.n).encode(std::exp(-r), 2);
  if (unblind == 0) {
    throw ParamError("convert: unblinding factor rounds to zero");
  }
  Ciphertext pb{mb.items[0].value, Scheme::kPaillier, ppk.key_id,
                v.scale_exp + 1};
  return paillier_scalar_mul(ppk, pb, unblind, 2);
}

Ciphertext convert_rsa_to_paillier(const Party& alice, const Party& bob,
                                   const Ciphertext& v, BigRng& rng,
                                   Transport& t) {
  return convert_rsa_to_paillier(alice, bob, v, rng.real(1.0, 2.0), rng, t);
}

Ciphertext rekey_paillier(const Party& alice, const Party& bob,
                          const Ciphertext& b, const Bigint& bound_hint,
                          BigRng& rng, Transport& t) {
  require_introduced(alice, bob);
  if (alice.peer_paillier.key_id != bob.paillier.pub.key_id) {
    throw KeyMismatchError("rekey: parties have not exchanged public keys");
  }
  if (b.scheme != Scheme::kPaillier) {
    throw ParamError("rekey: expected a Paillier ciphertext");
  }
  if (b.key_id != bob.peer_paillier.key_id) {
    throw KeyMismatchError("rekey: ciphertext is not under the peer's key");
  }
  if (bound_hint < 0) {
    throw ParamError("rekey: bound hint must be nonnegative");
  }

  const PaillierPublicKey& apk = bob.peer_paillier;
  Bigint r_max = apk.n >> 80;
  Bigint threshold = bound_hint << 40;
  if (threshold >= r_max / 2) {
    throw RangeError("rekey: plaintext bound too large to hide at this key size");
  }
  Bigint r;
  do {
    r = rng.below(r_max) + 1;
  } while (r <= threshold);

  Ciphertext blind = paillier_encrypt(apk, r, rng, b.scale_exp);
  Ciphertext c1 = paillier_add(apk, b, blind);
  Message m0 = begin_message(ProtocolId::kRekey, 0, Role::kBob);
  m0.items.push_back({std::move(c1.value), paillier_wire_width(apk)});
  t.send(std::move(m0));

  Message ma = expect_message(t, Role::kAlice, ProtocolId::kRekey, 0, 1);
  Ciphertext held{ma.items[0].value, Scheme::kPaillier,
                  alice.paillier.pub.key_id, 0};
  Bigint v = paillier_decrypt(alice.paillier, held);
  if (v >= alice.peer_paillier.n / 2) {
    throw RangeError("rekey: blinded value exceeds the peer's signed range");
  }
  Ciphertext c2 = paillier_encrypt(alice.peer_paillier, v, rng, 0);
  Message m1 = begin_message(ProtocolId::kRekey, 1, Role::kAlice);
  m1.items.push_back(
      {std::move(c2.value), paillier_wire_width(alice.peer_paillier)});
  t.send(std::move(m1));

  Message mb = expect_message(t, Role::kBob, ProtocolId::kRekey, 1, 1);
  const PaillierPublicKey& bpk = bob.paillier.pub;
  Ciphertext cb{mb.items[0].value, Scheme::kPaillier, bpk.key_id, b.scale_exp};
  Ciphertext neg = paillier_encrypt(bpk, bpk.n - r, rng, b.scale_exp);
  return paillier_add(bpk, cb, neg);
}

ProtocolRun run_protocol(ProtocolId id, const Party& alice,
                         const std::vector<double>& a, const Party& bob,
                         const std::vector<double>& b, BigRng& rng) {
  InProcessTransport t;
  ProtocolRun run;
  switch (id) {
    case ProtocolId::kSecureAdd:
      run.outputs = secure_add(alice, a, bob, b, rng, t);
      break;
    case ProtocolId::kSecureSub:
      run.outputs = secure_sub(alice, a, bob, b, rng, t);
      break;
    case ProtocolId::kSecureDot:
      run.outputs.push_back(secure_dot(alice, a, bob, b, rng, t));
      break;
    case ProtocolId::kSecureMul:
      if (a.empty() || b.empty()) {
        throw DimensionError("run_protocol: need one value per side");
      }
      run.outputs.push_back(secure_mul(alice, a[0], bob, b[0], t));
      break;
    case ProtocolId::kSecurePow:
    case ProtocolId::kConvert: {
      std::vector<long> exps;
      exps.reserve(b.size());
      for (double x : b) exps.push_back(std::lround(x));
      Ciphertext w = secure_pow(alice, a, bob, exps, t);
      if (id == ProtocolId::kSecurePow) {
        run.outputs.push_back(std::move(w));
      } else {
        run.outputs.push_back(convert_rsa_to_paillier(alice, bob, w, rng, t));
      }
      break;
    }
    case ProtocolId::kRekey: {
      if (a.empty()) {
        throw DimensionError("run_protocol: need a value to re-encrypt");
      }
      FixedPointCodec codec(alice.paillier.pub.n);
      Ciphertext c =
          paillier_encrypt(alice.paillier.pub, codec.encode(a[0], 1), rng, 1);
      Bigint bound =
          abs(Bigint(std::lround(a[0] * FixedPointCodec::kQ))) + 1;
      run.outputs.push_back(rekey_paillier(alice, bob, c, bound, rng, t));
      break;
    }
    default:
      throw ParamError("run_protocol: not a runnable protocol id");
  }
  run.transcript = t.transcript();
  return run;
}

}  // namespace heda
