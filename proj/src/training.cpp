#include "heda/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "heda/crypto.hpp"
#include "heda/dp.hpp"
#include "heda/errors.hpp"
#include "heda/features.hpp"
#include "heda/fixed_point.hpp"
#include "heda/transport.hpp"
#include "heda/wire.hpp"

namespace heda {

namespace {

constexpr long kQ = FixedPointCodec::kQ;

long double ln_q() {
  static const long double v = std::log(static_cast<long double>(kQ));
  return v;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Accumulates the enclosing scope's wall time into one role's counter.
class RoleTimer {
 public:
  explicit RoleTimer(double* sink) : sink_(sink), start_(Clock::now()) {}
  ~RoleTimer() { *sink_ += seconds_since(start_); }
  RoleTimer(const RoleTimer&) = delete;
  RoleTimer& operator=(const RoleTimer&) = delete;

 private:
  double* sink_;
  Clock::time_point start_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> lr_gradient(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y,
                                const std::vector<double>& beta) {
  if (x.empty()) throw ParamError("gradient needs at least one record");
  if (x.size() != y.size())
    throw DimensionError("records and labels differ in count");
  size_t d = beta.size();
  std::vector<double> g(d, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d)
      throw DimensionError("record width does not match the weight vector");
    double err = sigmoid(dot(beta, x[i])) - y[i];
    for (size_t j = 0; j < d; ++j) g[j] += x[i][j] * err;
  }
  for (size_t j = 0; j < d; ++j) g[j] /= static_cast<double>(x.size());
  return g;
}

double log_loss(const std::vector<std::vector<double>>& x,
                const std::vector<int>& y, const std::vector<double>& beta) {
  if (x.empty()) throw ParamError("loss needs at least one record");
  if (x.size() != y.size())
    throw DimensionError("records and labels differ in count");
  double total = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != beta.size())
      throw DimensionError("record width does not match the weight vector");
    double z = dot(beta, x[i]);
    // log(1 + e^t) evaluated without overflow for either sign of t.
    double t = (y[i] == 1) ? -z : z;
    total += (t > 0.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  return total / static_cast<double>(x.size());
}

TrainResult train_on_design(const std::vector<std::vector<double>>& x,
                            const std::vector<int>& y,
                            const TrainParams& params) {
  if (params.alpha <= 0.0) throw ParamError("learning rate must be positive");
  if (params.cycles == 0) throw ParamError("cycle limit must be positive");
  if (x.empty()) throw ParamError("training needs at least one record");
  auto start = Clock::now();
  TrainResult result;
  result.beta.assign(x[0].size(), 0.0);
  for (size_t t = 1; t <= params.cycles; ++t) {
    std::vector<double> g = lr_gradient(x, y, result.beta);
    double max_step = 0.0;
    for (size_t j = 0; j < result.beta.size(); ++j) {
      double step = params.alpha * g[j];
      result.beta[j] -= step;
      max_step = std::max(max_step, std::fabs(step));
    }
    result.iterations = t;
    if (max_step < params.min_update) break;
  }
  result.seconds_total = seconds_since(start);
  return result;
}

TrainResult plaintext_lr_train(const Dataset& data, const TrainParams& params) {
  if (data.size() == 0) throw ParamError("training needs at least one record");
  std::vector<std::vector<double>> design;
  design.reserve(data.size());
  for (const auto& row : data.records) {
    std::vector<double> r = row;
    r.push_back(1.0);
    design.push_back(std::move(r));
  }
  return train_on_design(design, data.labels, params);
}

int predict_label(const std::vector<double>& beta,
                  const std::vector<double>& x) {
  if (beta.size() != x.size() + 1)
    throw DimensionError("weight vector must be one longer than the record");
  double z = beta.back();
  for (size_t j = 0; j < x.size(); ++j) z += beta[j] * x[j];
  return sigmoid(z) >= 0.5 ? 1 : 0;
}

double accuracy(const std::vector<double>& beta, const Dataset& data) {
  if (data.size() == 0) throw ParamError("accuracy needs at least one record");
  size_t hits = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (predict_label(beta, data.records[i]) == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

long high_coordinate_cap(size_t encrypted_coords) {
  if (encrypted_coords == 0) return 0;
  return kExponentScaleCap / static_cast<long>(encrypted_coords);
}

double low_coordinate_cap(size_t noised_coords) {
  if (noised_coords == 0) return 0.0;
  return kLowMarginBudget / static_cast<double>(noised_coords);
}

long margin_base(double x, int sign) {
  if (!(x >= -1.0 && x <= 1.0))
    throw RangeError("margin base input outside [-1, 1]");
  long double e = std::exp(static_cast<long double>(sign > 0 ? x : -x));
  return static_cast<long>(std::llround(e * static_cast<long double>(kQ)));
}

// ---------------------------------------------------------------------------
// Shared plumbing between the encrypted trainer and its plaintext shadow.
// Every deterministic rounding lives here exactly once so the two paths
// cannot drift apart.

namespace {

// Attribute indices taking each path; the bias coordinate is implicit and
// always encrypted.
struct EnginePlan {
  std::vector<size_t> high;
  std::vector<size_t> low;
};

void check_provider_inputs(const std::vector<Dataset>& providers) {
  if (providers.empty()) throw ParamError("at least one provider required");
  size_t d = providers[0].dim();
  if (d == 0) throw ParamError("providers hold no attributes");
  for (const auto& p : providers) {
    if (p.size() == 0) throw ParamError("provider holds no records");
    if (p.dim() != d)
      throw DimensionError("providers disagree on attribute count");
    for (const auto& row : p.records) {
      for (double v : row) {
        if (!(v >= -1e-9 && v <= 1.0 + 1e-9))
          throw RangeError("features must be min-max normalized into [0, 1]");
      }
    }
    for (int y : p.labels) {
      if (y != 0 && y != 1) throw ParamError("labels must be 0 or 1");
    }
  }
}

EnginePlan identity_plan(size_t d) {
  EnginePlan plan;
  plan.high.resize(d);
  for (size_t j = 0; j < d; ++j) plan.high[j] = j;
  return plan;
}

EnginePlan negotiate_plan(const std::vector<Dataset>& providers, size_t iota,
                          const std::string& method) {
  size_t d = providers[0].dim();
  if (iota < 1 || iota > d)
    throw RangeError("iota must lie in [1, attribute count]");
  if (iota == d) return identity_plan(d);
  std::vector<FeatureScores> per;
  per.reserve(providers.size());
  for (const auto& p : providers) per.push_back(score_features(p, method));
  SplitPlan split = make_split_plan(negotiate_scores(per), iota);
  return EnginePlan{split.high, split.low};
}

uint64_t provider_dp_seed(uint64_t seed, size_t p) {
  return seed ^ (0xD09E3779B97F4A7CULL +
                 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(p + 1));
}

// Published values travel with four decimal digits; gradients quantize
// them further to the codec's two. Both trainers read them this way.
double wire_round4(double v) {
  double clamped = std::min(1.0, std::max(0.0, v));
  return static_cast<double>(std::llround(clamped * 1e4)) / 1e4;
}

long grad_units(double wire_value) { return std::lround(wire_value * kQ); }

// Paillier ciphertext with unit randomness: decrypts correctly but is
// deterministic, so it may only seed local accumulators whose sums get a
// freshly randomized blind added before anything leaves this party.
Ciphertext local_paillier(const PaillierPublicKey& pk, const Bigint& m,
                          int scale_exp) {
  Ciphertext c;
  c.value = (Bigint(1) + m * pk.n) % pk.n2;
  c.scheme = Scheme::kPaillier;
  c.key_id = pk.key_id;
  c.scale_exp = scale_exp;
  return c;
}

// Noised low columns of one provider, wire-rounded, indexed [column][record].
std::vector<std::vector<double>> publish_low_share(const Dataset& provider,
                                                   const std::vector<size_t>& low,
                                                   uint64_t seed) {
  Dataset view = select_columns(provider, low);
  EpsilonBudget budget = select_epsilon(view);
  NoisedDataset published =
      publish_ima_dp(view, best_cluster_size(view.size()), budget, seed);
  std::vector<std::vector<double>> cols(low.size());
  for (size_t c = 0; c < low.size(); ++c) {
    cols[c].resize(view.size());
    for (size_t i = 0; i < view.size(); ++i) {
      cols[c][i] = wire_round4(published.data.records[i][c]);
    }
  }
  return cols;
}

// Per-coordinate quantized weights for the exponent product, encrypted
// coordinates only, bias last. Updates are clipped, so the total stays
// within kExponentScaleCap by construction; the check guards regressions.
std::vector<long> quantize_high(const std::vector<double>& beta,
                                const EnginePlan& plan, size_t d) {
  std::vector<long> units;
  units.reserve(plan.high.size() + 1);
  long total = 0;
  for (size_t j : plan.high) units.push_back(std::lround(beta[j] * kQ));
  units.push_back(std::lround(beta[d] * kQ));
  for (long u : units) total += std::labs(u);
  if (total > kExponentScaleCap)
    throw RangeError("quantized weights exceed the exponent budget");
  return units;
}

struct UpdateOutcome {
  double max_step = 0.0;
  size_t clipped = 0;
};

// One gradient step with the budget clips both trainers share. num holds
// sum_records x_ij (sigma_i - y_i) per global coordinate, bias at index d.
UpdateOutcome apply_update(std::vector<double>& beta,
                           const std::vector<double>& num, size_t m_total,
                           const EnginePlan& plan, size_t d,
                           const TrainParams& params) {
  double cap_high = static_cast<double>(high_coordinate_cap(plan.high.size() + 1)) / kQ;
  double cap_low = low_coordinate_cap(plan.low.size());
  UpdateOutcome out;
  auto step = [&](size_t j, double cap) {
    double next =
        beta[j] - params.alpha * num[j] / static_cast<double>(m_total);
    if (next > cap) {
      next = cap;
      ++out.clipped;
    } else if (next < -cap) {
      next = -cap;
      ++out.clipped;
    }
    out.max_step = std::max(out.max_step, std::fabs(next - beta[j]));
    beta[j] = next;
  };
  for (size_t j : plan.high) step(j, cap_high);
  step(d, cap_high);
  for (size_t j : plan.low) step(j, cap_low);
  return out;
}

// ---------------------------------------------------------------------------
// Encrypted engine. The user plays Bob on every channel; each provider
// plays Alice and owns the Paillier/RSA pair its slice is processed
// under. Per provider and iteration the wire carries exactly one
// data message, one conversion exchange, one logistic exchange, and one
// rekey exchange: three provider-after-user turns.

struct ProviderCtx {
  const Dataset* data;
  PaillierKey paillier;
  RsaKey rsa;
  FixedPointCodec codec;
  FixedPointCodec rsa_codec;
  InProcessTransport chan;
  uint32_t pail_width;
  uint32_t rsa_width;
  // User-side copies received over the channel.
  std::vector<std::vector<double>> wire_low;
  std::vector<int> labels;

  ProviderCtx(const Dataset& d, PaillierKey pk, RsaKey rk)
      : data(&d),
        paillier(std::move(pk)),
        rsa(std::move(rk)),
        codec(paillier.pub.n),
        rsa_codec(rsa.pub.n),
        pail_width((2 * paillier.pub.bits + 7) / 8),
        rsa_width((rsa.pub.bits + 7) / 8) {}
};

struct UserCtx {
  PaillierKey key;
  FixedPointCodec codec;
  uint32_t width;

  explicit UserCtx(PaillierKey k)
      : key(std::move(k)), codec(key.pub.n), width((2 * key.pub.bits + 7) / 8) {}
};

Ciphertext as_ciphertext(const WireItem& item, Scheme scheme, uint64_t key_id,
                         int scale) {
  return Ciphertext{item.value, scheme, key_id, scale};
}

WireItem as_item(const Ciphertext& c, uint32_t width) {
  return WireItem{c.value, width};
}

// Everything the user holds about one provider during one iteration.
struct IterState {
  std::vector<Ciphertext> base_pos;  // H*m RSA bases, record-major per coord
  std::vector<Ciphertext> base_neg;
  std::vector<Ciphertext> sum_xy;  // per encrypted coord, scale 4
  std::vector<Ciphertext> sum_x;
  std::vector<long> unblind;  // per record, scale-2 conversion scalar
  long k2 = 0;                // scale-1 logistic unblind scalar
  std::vector<Bigint> rekey_blind;
  std::vector<int> rekey_scale;
};

// Provider: per-record exponential bases both ways plus the label and
// feature aggregates for every encrypted coordinate.
void provider_send_data(ProviderCtx& ctx, const EnginePlan& plan,
                        BigRng& rng) {
  const Dataset& data = *ctx.data;
  size_t m = data.size();
  size_t coords = plan.high.size() + 1;
  auto column_value = [&](size_t c, size_t i) {
    return c + 1 < coords ? data.records[i][plan.high[c]] : 1.0;
  };
  std::vector<WireItem> items;
  items.reserve(2 * coords * m + 2 * coords);
  for (int sign : {+1, -1}) {
    for (size_t c = 0; c < coords; ++c) {
      for (size_t i = 0; i < m; ++i) {
        Bigint base(margin_base(column_value(c, i), sign));
        items.push_back(as_item(rsa_encrypt(ctx.rsa.pub, base, 1), ctx.rsa_width));
      }
    }
  }
  for (size_t c = 0; c < coords; ++c) {
    double sum_xy = 0.0;
    for (size_t i = 0; i < m; ++i) sum_xy += column_value(c, i) * data.labels[i];
    Bigint enc = ctx.codec.encode(sum_xy, 4);
    items.push_back(as_item(paillier_encrypt(ctx.paillier.pub, enc, rng, 4),
                            ctx.pail_width));
  }
  for (size_t c = 0; c < coords; ++c) {
    double sum_x = 0.0;
    for (size_t i = 0; i < m; ++i) sum_x += column_value(c, i);
    Bigint enc = ctx.codec.encode(sum_x, 4);
    items.push_back(as_item(paillier_encrypt(ctx.paillier.pub, enc, rng, 4),
                            ctx.pail_width));
  }
  ctx.chan.send(Message{ProtocolId::kTrainData, 0, Role::kAlice,
                        std::move(items)});
}

// User: raise each record's bases to the quantized weights, pad the
// product to the shared scale cap, and fold the plaintext-path margin
// plus a fresh two-part blind into the exponent.
IterState user_send_margins(ProviderCtx& ctx, const EnginePlan& plan,
                            const std::vector<long>& units,
                            const std::vector<double>& beta,
                            std::mt19937_64& pick) {
  Message data = ctx.chan.receive(Role::kBob);
  size_t coords = plan.high.size() + 1;
  size_t m = ctx.data->size();
  IterState state;
  state.base_pos.reserve(coords * m);
  state.base_neg.reserve(coords * m);
  uint64_t rsa_id = ctx.rsa.pub.key_id;
  for (size_t idx = 0; idx < coords * m; ++idx) {
    state.base_pos.push_back(
        as_ciphertext(data.items[idx], Scheme::kRsa, rsa_id, 1));
    state.base_neg.push_back(
        as_ciphertext(data.items[coords * m + idx], Scheme::kRsa, rsa_id, 1));
  }
  uint64_t pail_id = ctx.paillier.pub.key_id;
  for (size_t c = 0; c < coords; ++c) {
    state.sum_xy.push_back(as_ciphertext(data.items[2 * coords * m + c],
                                         Scheme::kPaillier, pail_id, 4));
    state.sum_x.push_back(as_ciphertext(data.items[2 * coords * m + coords + c],
                                        Scheme::kPaillier, pail_id, 4));
  }

  long total_units = 0;
  for (long u : units) total_units += std::labs(u);
  long pad = kExponentScaleCap - total_units;

  std::uniform_int_distribution<long> grid(1, kQ);
  std::uniform_int_distribution<uint64_t> mask64(0, (1ULL << 63) - 1);
  const long double ln2 = std::log(2.0L);
  std::vector<WireItem> request;
  request.reserve(m);
  state.unblind.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (size_t c = 0; c < plan.low.size(); ++c) {
      s += beta[plan.low[c]] * ctx.wire_low[c][i];
    }
    // Exponent blind: r covers the plaintext-path margin when it is
    // negative, the mask contributes 64 more multiplicative bits. The
    // blind is built as mask * 2^shift so its logarithm is known exactly.
    double r = std::max(0.0, -s) + static_cast<double>(grid(pick)) / kQ;
    long double target = static_cast<long double>(kQ) *
                         (static_cast<long double>(r) + static_cast<long double>(s));
    long shift = static_cast<long>(std::llround(target / ln2));
    Bigint mask = Bigint(1) << 63 | Bigint(mask64(pick));
    Bigint blind = mask << static_cast<unsigned long>(shift);
    long double ln_blind = ctx.rsa_codec.decode_ln(blind, 0);

    Ciphertext acc = rsa_encrypt(ctx.rsa.pub, q_pow(static_cast<int>(pad)) * blind,
                                 static_cast<int>(pad));
    for (size_t c = 0; c < coords; ++c) {
      long u = units[c];
      if (u == 0) continue;
      const Ciphertext& base =
          u > 0 ? state.base_pos[c * m + i] : state.base_neg[c * m + i];
      acc = rsa_mul(ctx.rsa.pub, acc, rsa_pow(ctx.rsa.pub, base, Bigint(std::labs(u))));
    }
    if (acc.scale_exp != kExponentScaleCap)
      throw ScaleMismatchError("margin product missed the shared scale cap");
    long double k_exp = static_cast<long double>(s) - ln_blind / kQ;
    state.unblind.push_back(static_cast<long>(
        std::llround(std::exp(k_exp) * static_cast<long double>(kQ) * kQ)));
    request.push_back(as_item(acc, ctx.rsa_width));
  }
  ctx.chan.send(Message{ProtocolId::kConvert, 0, Role::kBob, std::move(request)});
  return state;
}

// Provider: decrypt each margin product, strip the shared scale cap in
// the log domain, take the Q-th root, and return the result under its
// own Paillier key. The blind keeps the margin itself hidden.
void provider_convert_reply(ProviderCtx& ctx, BigRng& rng) {
  Message request = ctx.chan.receive(Role::kAlice);
  std::vector<WireItem> reply;
  reply.reserve(request.items.size());
  for (const auto& item : request.items) {
    Bigint w = rsa_decrypt(ctx.rsa, as_ciphertext(item, Scheme::kRsa,
                                                  ctx.rsa.pub.key_id,
                                                  kExponentScaleCap));
    long double ln_w = ctx.rsa_codec.decode_ln(w, 0);
    long double root = std::exp((ln_w - kExponentScaleCap * ln_q()) / kQ);
    long enc = std::lround(static_cast<double>(root * kQ));
    if (enc <= 0) throw RangeError("margin conversion underflowed");
    reply.push_back(as_item(
        paillier_encrypt(ctx.paillier.pub, Bigint(enc), rng, 1), ctx.pail_width));
  }
  ctx.chan.send(Message{ProtocolId::kConvert, 1, Role::kAlice, std::move(reply)});
}

// User: unblind each converted margin, shift it by one, and blind the
// batch with a fresh factor before asking for the logistic values.
void user_send_logistic_request(ProviderCtx& ctx, IterState& state,
                                BigRng& rng, std::mt19937_64& pick) {
  Message reply = ctx.chan.receive(Role::kBob);
  std::uniform_int_distribution<long> grid(kQ, 2 * kQ);
  double r2 = static_cast<double>(grid(pick)) / kQ;
  state.k2 = std::lround(std::exp(r2) * kQ);
  std::vector<WireItem> request;
  request.reserve(reply.items.size());
  for (size_t i = 0; i < reply.items.size(); ++i) {
    Ciphertext root = as_ciphertext(reply.items[i], Scheme::kPaillier,
                                    ctx.paillier.pub.key_id, 1);
    Ciphertext exp_margin = paillier_scalar_mul(ctx.paillier.pub, root,
                                                Bigint(state.unblind[i]), 2);
    Ciphertext one = paillier_encrypt(ctx.paillier.pub, q_pow(3), rng, 3);
    Ciphertext shifted = paillier_add(ctx.paillier.pub, exp_margin, one);
    request.push_back(as_item(
        paillier_scalar_mul(ctx.paillier.pub, shifted, Bigint(state.k2), 1),
        ctx.pail_width));
  }
  ctx.chan.send(Message{ProtocolId::kTrainSigmoid, 0, Role::kBob,
                        std::move(request)});
}

// Provider: decrypt the blinded denominators and return x_ij / w_i for
// every encrypted coordinate. The bias column doubles as 1 / w_i.
void provider_logistic_reply(ProviderCtx& ctx, const EnginePlan& plan,
                             BigRng& rng) {
  Message request = ctx.chan.receive(Role::kAlice);
  const Dataset& data = *ctx.data;
  size_t m = data.size();
  size_t coords = plan.high.size() + 1;
  std::vector<double> w(m);
  for (size_t i = 0; i < m; ++i) {
    Bigint plain = paillier_decrypt(
        ctx.paillier, as_ciphertext(request.items[i], Scheme::kPaillier,
                                    ctx.paillier.pub.key_id, 4));
    w[i] = ctx.codec.decode(plain, 4);
    if (!(w[i] > 0.0)) throw RangeError("blinded denominator not positive");
  }
  std::vector<WireItem> reply;
  reply.reserve(coords * m);
  for (size_t c = 0; c < coords; ++c) {
    for (size_t i = 0; i < m; ++i) {
      double x = c + 1 < coords ? data.records[i][plan.high[c]] : 1.0;
      long enc = std::lround(x / w[i] * kQ * kQ * kQ);
      reply.push_back(as_item(
          paillier_encrypt(ctx.paillier.pub, Bigint(enc), rng, 3),
          ctx.pail_width));
    }
  }
  ctx.chan.send(Message{ProtocolId::kTrainSigmoid, 1, Role::kAlice,
                        std::move(reply)});
}

// User: unblind the logistic terms, assemble every gradient coordinate
// under the provider's key, then blind each one for rekeying.
void user_send_rekey_request(ProviderCtx& ctx, IterState& state,
                             const EnginePlan& plan, BigRng& rng) {
  Message reply = ctx.chan.receive(Role::kBob);
  const PaillierPublicKey& pub = ctx.paillier.pub;
  size_t m = ctx.data->size();
  size_t coords = plan.high.size() + 1;
  // reply item (c, i) decrypts to x_ij e^{-r2} (1 - sigma_i) at scale 3;
  // multiplying by k2 = round(e^{r2} Q) restores x_ij (1 - sigma_i).
  auto unblinded = [&](size_t c, size_t i) {
    Ciphertext ct = as_ciphertext(reply.items[c * m + i], Scheme::kPaillier,
                                  pub.key_id, 3);
    return paillier_scalar_mul(pub, ct, Bigint(state.k2), 1);
  };
  std::vector<Ciphertext> gradients;
  gradients.reserve(coords + plan.low.size());
  for (size_t c = 0; c < coords; ++c) {
    Ciphertext acc = unblinded(c, 0);
    for (size_t i = 1; i < m; ++i) {
      acc = paillier_add(pub, acc, unblinded(c, i));
    }
    // sum x sigma - sum x y = sum x - sum x (1 - sigma) - sum x y.
    Ciphertext minus_acc = paillier_scalar_mul(pub, acc, Bigint(-1));
    Ciphertext minus_xy = paillier_scalar_mul(pub, state.sum_xy[c], Bigint(-1));
    Ciphertext g = paillier_add(pub, state.sum_x[c], minus_acc);
    gradients.push_back(paillier_add(pub, g, minus_xy));
  }
  for (size_t c = 0; c < plan.low.size(); ++c) {
    // The bias column of the logistic reply carries 1 - sigma_i; the
    // noised column enters as a plaintext scalar per record.
    Ciphertext acc = local_paillier(pub, Bigint(0), 5);
    long sum_units = 0;
    for (size_t i = 0; i < m; ++i) {
      long units = grad_units(ctx.wire_low[c][i]);
      sum_units += units * (1 - ctx.labels[i]);
      if (units == 0) continue;
      Ciphertext term =
          paillier_scalar_mul(pub, unblinded(coords - 1, i), Bigint(units), 1);
      acc = paillier_add(pub, acc, term);
    }
    // sum x~ sigma - sum x~ y = sum x~ (1 - y) - sum x~ (1 - sigma).
    Bigint known = ctx.codec.wrap_signed(Bigint(sum_units) * q_pow(4));
    Ciphertext g = paillier_add(pub, local_paillier(pub, known, 5),
                                paillier_scalar_mul(pub, acc, Bigint(-1)));
    gradients.push_back(g);
  }

  Bigint r_max = pub.n >> 80;
  std::vector<WireItem> request;
  request.reserve(gradients.size());
  state.rekey_blind.clear();
  state.rekey_scale.clear();
  for (auto& g : gradients) {
    Bigint bound = Bigint(static_cast<long>(m) + 1) * q_pow(g.scale_exp);
    Bigint threshold = bound << 40;
    if (threshold >= r_max)
      throw RangeError("gradient bound too large for the rekey blind");
    Bigint r = rng.below(r_max) + 1;
    while (r <= threshold) r = rng.below(r_max) + 1;
    Ciphertext blinded =
        paillier_add(pub, g, paillier_encrypt(pub, r, rng, g.scale_exp));
    state.rekey_blind.push_back(std::move(r));
    state.rekey_scale.push_back(g.scale_exp);
    request.push_back(as_item(blinded, ctx.pail_width));
  }
  ctx.chan.send(Message{ProtocolId::kRekey, 0, Role::kBob, std::move(request)});
}

// Provider: move each blinded gradient to the user's key. The blind is
// huge against the gradient's bound, so the decrypted value says nothing.
void provider_rekey_reply(ProviderCtx& ctx, const UserCtx& user,
                          const std::vector<int>& scales, BigRng& rng) {
  Message request = ctx.chan.receive(Role::kAlice);
  std::vector<WireItem> reply;
  reply.reserve(request.items.size());
  for (size_t c = 0; c < request.items.size(); ++c) {
    Bigint v = paillier_decrypt(
        ctx.paillier, as_ciphertext(request.items[c], Scheme::kPaillier,
                                    ctx.paillier.pub.key_id, scales[c]));
    if (v >= user.key.pub.n)
      throw RangeError("blinded gradient exceeds the target modulus");
    reply.push_back(as_item(
        paillier_encrypt(user.key.pub, v, rng, scales[c]), user.width));
  }
  ctx.chan.send(Message{ProtocolId::kRekey, 1, Role::kAlice, std::move(reply)});
}

// User: strip the blinds from the decrypted plaintexts and decode the
// per-provider gradient numerators into num, indexed by global coordinate.
void user_collect_gradients(ProviderCtx& ctx, UserCtx& user, IterState& state,
                            const EnginePlan& plan, std::vector<double>& num) {
  Message reply = ctx.chan.receive(Role::kBob);
  size_t coords = plan.high.size() + 1;
  size_t d = ctx.data->dim();
  for (size_t c = 0; c < reply.items.size(); ++c) {
    Ciphertext ct = as_ciphertext(reply.items[c], Scheme::kPaillier,
                                  user.key.pub.key_id, state.rekey_scale[c]);
    Bigint plain = paillier_decrypt(user.key, ct) - state.rekey_blind[c];
    if (plain < 0) plain += user.key.pub.n;
    double value = user.codec.decode(plain, state.rekey_scale[c]);
    size_t global = c < coords
                        ? (c + 1 < coords ? plan.high[c] : d)
                        : plan.low[c - coords];
    num[global] += value;
  }
}

TrainResult run_encrypted(const std::vector<Dataset>& providers,
                          const EnginePlan& plan, const TrainParams& params) {
  check_provider_inputs(providers);
  if (params.alpha <= 0.0) throw ParamError("learning rate must be positive");
  if (params.cycles == 0) throw ParamError("cycle limit must be positive");
  if (params.key_bits < 512)
    throw ParamError("key_bits below 512 cannot hold the exponent budget");

  size_t d = providers[0].dim();
  size_t m_total = 0;
  for (const auto& p : providers) m_total += p.size();

  auto start_total = Clock::now();
  TrainResult result;
  result.beta.assign(d + 1, 0.0);

  BigRng key_rng(params.seed ^ 0x6B65795F67656E5FULL);
  BigRng user_rng(params.seed ^ 0x757365725F726E67ULL);
  BigRng prov_rng(params.seed ^ 0x70726F765F726E67ULL);
  std::mt19937_64 pick(params.seed ^ 0x626C696E645F3634ULL);

  auto start_keygen = Clock::now();
  UserCtx user(paillier_keygen(params.key_bits, key_rng));
  std::vector<ProviderCtx> ctx;
  ctx.reserve(providers.size());
  for (const auto& p : providers) {
    ctx.emplace_back(p, paillier_keygen(params.key_bits, key_rng),
                     rsa_keygen(params.key_bits, key_rng));
  }
  result.seconds_keygen = seconds_since(start_keygen);

  // Plaintext-path setup: each provider publishes its noised low columns
  // and labels once; the user keeps the wire-rounded copies.
  for (size_t p = 0; p < ctx.size(); ++p) {
    if (plan.low.empty()) break;
    size_t m = ctx[p].data->size();
    {
      RoleTimer timer(&result.seconds_provider);
      auto cols = publish_low_share(*ctx[p].data, plan.low,
                                    provider_dp_seed(params.seed, p));
      std::vector<WireItem> items;
      items.reserve(plan.low.size() * m + m);
      for (size_t c = 0; c < plan.low.size(); ++c) {
        for (size_t i = 0; i < m; ++i) {
          items.push_back(WireItem{Bigint(std::lround(cols[c][i] * 1e4)), 8});
        }
      }
      for (size_t i = 0; i < m; ++i) {
        items.push_back(WireItem{Bigint(ctx[p].data->labels[i]), 1});
      }
      ctx[p].chan.send(Message{ProtocolId::kTrainData, 1, Role::kAlice,
                               std::move(items)});
    }
    {
      RoleTimer timer(&result.seconds_user);
      Message setup = ctx[p].chan.receive(Role::kBob);
      ctx[p].wire_low.assign(plan.low.size(), std::vector<double>(m));
      ctx[p].labels.resize(m);
      for (size_t c = 0; c < plan.low.size(); ++c) {
        for (size_t i = 0; i < m; ++i) {
          ctx[p].wire_low[c][i] =
              setup.items[c * m + i].value.get_d() / 1e4;
        }
      }
      for (size_t i = 0; i < m; ++i) {
        ctx[p].labels[i] =
            static_cast<int>(setup.items[plan.low.size() * m + i].value.get_si());
      }
    }
  }

  for (size_t t = 1; t <= params.cycles; ++t) {
    std::vector<long> units;
    {
      RoleTimer timer(&result.seconds_user);
      units = quantize_high(result.beta, plan, d);
    }
    std::vector<double> num(d + 1, 0.0);
    for (auto& pc : ctx) {
      IterState state;
      {
        RoleTimer timer(&result.seconds_provider);
        provider_send_data(pc, plan, prov_rng);
      }
      {
        RoleTimer timer(&result.seconds_user);
        state = user_send_margins(pc, plan, units, result.beta, pick);
      }
      {
        RoleTimer timer(&result.seconds_provider);
        provider_convert_reply(pc, prov_rng);
      }
      {
        RoleTimer timer(&result.seconds_user);
        user_send_logistic_request(pc, state, user_rng, pick);
      }
      {
        RoleTimer timer(&result.seconds_provider);
        provider_logistic_reply(pc, plan, prov_rng);
      }
      {
        RoleTimer timer(&result.seconds_user);
        user_send_rekey_request(pc, state, plan, user_rng);
      }
      {
        RoleTimer timer(&result.seconds_provider);
        provider_rekey_reply(pc, user, state.rekey_scale, prov_rng);
      }
      {
        RoleTimer timer(&result.seconds_user);
        user_collect_gradients(pc, user, state, plan, num);
      }
    }
    UpdateOutcome outcome;
    {
      RoleTimer timer(&result.seconds_user);
      outcome = apply_update(result.beta, num, m_total, plan, d, params);
    }
    result.clipped_updates += outcome.clipped;
    result.iterations = t;
    if (params.capture) params.capture->beta_history.push_back(result.beta);
    if (outcome.max_step < params.min_update) break;
  }

  for (auto& pc : ctx) {
    result.round_trips += pc.chan.transcript().round_trips();
    result.bytes += pc.chan.transcript().total_bytes();
  }
  if (params.capture) {
    params.capture->user_paillier = user.key;
    for (auto& pc : ctx) {
      params.capture->transcripts.push_back(pc.chan.transcript());
      params.capture->provider_paillier.push_back(pc.paillier);
      params.capture->provider_rsa.push_back(pc.rsa);
    }
  }
  result.seconds_total = seconds_since(start_total);
  return result;
}

}  // namespace

TrainResult secure_lr_train(const std::vector<Dataset>& providers,
                            const TrainParams& params) {
  check_provider_inputs(providers);
  return run_encrypted(providers, identity_plan(providers[0].dim()), params);
}

TrainResult heda_train(const std::vector<Dataset>& providers, size_t iota,
                       const TrainParams& params,
                       const std::string& score_method) {
  check_provider_inputs(providers);
  EnginePlan plan = negotiate_plan(providers, iota, score_method);
  return run_encrypted(providers, plan, params);
}

TrainResult shadow_lr_train(const std::vector<Dataset>& providers, size_t iota,
                            const TrainParams& params,
                            const std::string& score_method) {
  check_provider_inputs(providers);
  if (params.alpha <= 0.0) throw ParamError("learning rate must be positive");
  if (params.cycles == 0) throw ParamError("cycle limit must be positive");
  EnginePlan plan = negotiate_plan(providers, iota, score_method);
  size_t d = providers[0].dim();
  size_t coords = plan.high.size() + 1;
  size_t m_total = 0;
  for (const auto& p : providers) m_total += p.size();

  auto start = Clock::now();
  std::vector<std::vector<std::vector<double>>> wire_low(providers.size());
  for (size_t p = 0; p < providers.size(); ++p) {
    if (plan.low.empty()) break;
    wire_low[p] = publish_low_share(providers[p], plan.low,
                                    provider_dp_seed(params.seed, p));
  }

  TrainResult result;
  result.beta.assign(d + 1, 0.0);
  for (size_t t = 1; t <= params.cycles; ++t) {
    std::vector<long> units = quantize_high(result.beta, plan, d);
    std::vector<double> num(d + 1, 0.0);
    for (size_t p = 0; p < providers.size(); ++p) {
      const Dataset& data = providers[p];
      for (size_t i = 0; i < data.size(); ++i) {
        long double margin = 0.0L;
        for (size_t c = 0; c < coords; ++c) {
          long u = units[c];
          if (u == 0) continue;
          double x = c + 1 < coords ? data.records[i][plan.high[c]] : 1.0;
          long double ln_base = std::log(
              static_cast<long double>(margin_base(x, u > 0 ? +1 : -1)));
          margin += static_cast<long double>(std::labs(u)) * (ln_base - ln_q());
        }
        margin /= kQ;
        for (size_t c = 0; c < plan.low.size(); ++c) {
          margin += result.beta[plan.low[c]] * wire_low[p][c][i];
        }
        double err = sigmoid(static_cast<double>(margin)) - data.labels[i];
        for (size_t c = 0; c + 1 < coords; ++c) {
          num[plan.high[c]] += data.records[i][plan.high[c]] * err;
        }
        num[d] += err;
        for (size_t c = 0; c < plan.low.size(); ++c) {
          double x_grad =
              static_cast<double>(grad_units(wire_low[p][c][i])) / kQ;
          num[plan.low[c]] += x_grad * err;
        }
      }
    }
    UpdateOutcome outcome = apply_update(result.beta, num, m_total, plan, d,
                                         params);
    result.clipped_updates += outcome.clipped;
    result.iterations = t;
    if (outcome.max_step < params.min_update) break;
  }
  result.seconds_total = seconds_since(start);
  return result;
}

}  // namespace heda
