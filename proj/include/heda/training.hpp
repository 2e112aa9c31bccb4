#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heda/crypto.hpp"
#include "heda/dataset.hpp"
#include "heda/wire.hpp"

namespace heda {

// Audit sink for the encrypted trainers: everything an honest-but-curious
// verifier needs to replay a run, including the secret keys. Strictly a
// test and inspection facility; production callers leave it unset.
struct TrainCapture {
  std::vector<Transcript> transcripts;
  std::vector<PaillierKey> provider_paillier;
  std::vector<RsaKey> provider_rsa;
  PaillierKey user_paillier;
  std::vector<std::vector<double>> beta_history;
};

// Gradient-descent hyperparameters plus the run-wide seed and key size
// the encrypted trainers consume.
struct TrainParams {
  double alpha = 0.1;
  size_t cycles = 100;
  double min_update = 1e-4;
  unsigned key_bits = 2048;
  uint64_t seed = 0;
  TrainCapture* capture = nullptr;
};

// Output of any trainer. beta holds one weight per attribute in the
// original column order plus the bias last. Round trips and bytes are
// summed over providers; the encrypted trainers fill the role timings,
// the plaintext ones leave them zero.
struct TrainResult {
  std::vector<double> beta;
  size_t iterations = 0;
  size_t round_trips = 0;
  size_t bytes = 0;
  size_t clipped_updates = 0;
  double seconds_keygen = 0.0;
  double seconds_user = 0.0;
  double seconds_provider = 0.0;
  double seconds_total = 0.0;
};

// e^z / (1 + e^z), evaluated from the side that cannot overflow.
double sigmoid(double z);

// Log-loss gradient on a raw design matrix (no bias column is added):
// (1/m) sum_i x_ij (sigmoid(beta x_i) - y_i).
std::vector<double> lr_gradient(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y,
                                const std::vector<double>& beta);

double log_loss(const std::vector<std::vector<double>>& x,
                const std::vector<int>& y, const std::vector<double>& beta);

// Full-batch gradient descent from beta = 0 on a raw design matrix.
// Stops after params.cycles iterations or when no coordinate moved by
// at least params.min_update.
TrainResult train_on_design(const std::vector<std::vector<double>>& x,
                            const std::vector<int>& y,
                            const TrainParams& params);

// The same descent with a constant-1 bias column appended to the data.
TrainResult plaintext_lr_train(const Dataset& data, const TrainParams& params);

int predict_label(const std::vector<double>& beta,
                  const std::vector<double>& x);
double accuracy(const std::vector<double>& beta, const Dataset& data);

// ---------------------------------------------------------------------------
// Encrypted training. Each provider holds a horizontal slice of the
// records plus its own keypairs; the user holds beta and its own
// Paillier keypair, and learns nothing but the aggregated gradients.
// Features must already be min-max normalized into [0, 1].

// Every attribute takes the encrypted path. Exactly 3 round trips per
// provider per iteration.
TrainResult secure_lr_train(const std::vector<Dataset>& providers,
                            const TrainParams& params);

// Mixed pipeline: attributes are scored and negotiated across providers,
// the iota top-ranked ones take the encrypted path, the rest are
// published with centroid-plus-Laplace noising and their gradient
// coordinates computed on the noised columns. iota = d degenerates to
// secure_lr_train.
TrainResult heda_train(const std::vector<Dataset>& providers, size_t iota,
                       const TrainParams& params,
                       const std::string& score_method = "kw");

// Plaintext twin of the encrypted pipeline: it reproduces every
// deterministic quantization the encrypted path applies (clipped
// integer beta, rounded exponential bases, wire-rounded noised columns)
// while skipping the random blinds, so an encrypted run with the same
// seed must land within fixed-point noise of it.
TrainResult shadow_lr_train(const std::vector<Dataset>& providers, size_t iota,
                            const TrainParams& params,
                            const std::string& score_method = "kw");

// ---------------------------------------------------------------------------
// Fixed-point budget of the encrypted margin path, shared by the real
// and shadow trainers and pinned by tests.

// Total quantized weight the exponent product may carry: with the codec
// base Q = 100 every unit adds ln(100) to the value's logarithm, and 20
// units plus the margin, blind, and mask stay inside a 512-bit modulus.
inline constexpr long kExponentScaleCap = 20;

// Margin contribution allowed to the noised columns.
inline constexpr double kLowMarginBudget = 0.8;

// Per-coordinate clip bounds implied by the budget: quantized encrypted
// weights share kExponentScaleCap units, plaintext-path weights share
// kLowMarginBudget.
long high_coordinate_cap(size_t encrypted_coords);
double low_coordinate_cap(size_t noised_coords);

// round(e^{sign * x} * Q), the integer base a record contributes to the
// exponent product.
long margin_base(double x, int sign);

}  // namespace heda
