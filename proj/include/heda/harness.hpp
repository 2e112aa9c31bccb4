#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heda/dataset.hpp"
#include "heda/dp.hpp"
#include "heda/features.hpp"
#include "heda/training.hpp"
#include "heda/wire.hpp"

namespace heda {

// Synthetic classification data: attributes uniform on [0, 1], labels
// drawn from a logistic ground truth whose coefficients alternate in
// sign and decay with the column index. Column order is importance
// order, so scoring methods have a real ranking to recover.
Dataset synthesize_logistic(size_t m, size_t d, uint64_t seed);

// Rescales every attribute by the reference's recorded range instead of
// the data's own, so held-out records share the training set's
// geometry. Constant reference columns map to 0.
Dataset normalize_like(const Dataset& data, const Dataset& reference);

// Concatenates slices that share a schema into one dataset, keeping the
// first slice's attribute metadata and refreshing the ranges.
Dataset pool_records(const std::vector<Dataset>& slices);

// Writes a header-row CSV that load_csv reads back: attribute columns in
// order, the label column last, doubles at full round-trip precision.
void save_csv(const Dataset& data, const std::string& label_column,
              const std::string& path);

// Ordinary least squares y = slope * x + intercept. r_squared is 1 for
// a perfect fit and for degenerate inputs (a single point, or constant
// y) where the fit is exact by construction.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Noising study: centroid publication versus plain per-record noise
// under one shared per-attribute budget.

struct AttributeBudgetRow {
  std::string name;
  double epsilon = 0.0;
  // Raw sensitivity and the centroid sensitivity at the chosen cluster
  // size.
  double delta_f = 0.0;
  double delta_f_prime = 0.0;
};

struct PublishReport {
  size_t cluster_size = 0;
  size_t runs = 0;
  double dataset_epsilon = 0.0;
  std::vector<AttributeBudgetRow> attributes;
  // Distortion and re-identification rate, averaged over runs, for the
  // clustered mechanism and the per-record baseline.
  double sse_ima = 0.0;
  double sse_standard = 0.0;
  double linkage_ima = 0.0;
  double linkage_standard = 0.0;
};

// Publishes `data` `runs` times with both mechanisms and averages sse
// and record_linkage. Run r mixes r into the seed, so runs differ but
// the report is reproducible.
PublishReport run_publish_report(const Dataset& data, size_t cluster_size,
                                 size_t runs, uint64_t seed);

struct DpSweepReport {
  size_t runs = 0;
  size_t recommended_cluster_size = 0;
  double dataset_epsilon = 0.0;
  std::vector<PublishReport> points;
};

// run_publish_report across several cluster sizes.
DpSweepReport run_dp_sweep(const Dataset& data,
                           const std::vector<size_t>& cluster_sizes,
                           size_t runs, uint64_t seed);

// ---------------------------------------------------------------------------
// Micro-benchmark of the seven two-party blocks.

struct BlockBenchRow {
  ProtocolId id = ProtocolId::kSecureAdd;
  std::string name;
  // Values computed per run: the vector blocks process `payload`
  // entries, the scalar blocks one.
  size_t payload = 0;
  size_t repetitions = 0;
  double millis_mean = 0.0;
  // Traffic of the block's own messages only, so the staging a
  // conversion or re-encryption run needs to obtain its input ciphertext
  // is not billed to the block.
  size_t bytes = 0;
  size_t round_trips = 0;
};

// Runs every block `repetitions` times under fresh keys of the given
// size and averages the wall time per run.
std::vector<BlockBenchRow> run_block_bench(unsigned key_bits, size_t payload,
                                           size_t repetitions, uint64_t seed);

// ---------------------------------------------------------------------------
// Mode comparison on one train/test split.

struct TrainCompareRow {
  std::string mode;
  // Attributes on the encrypted path; d for the plain and fully
  // encrypted modes.
  size_t iota = 0;
  double accuracy_train = 0.0;
  double accuracy_test = 0.0;
  size_t iterations = 0;
  size_t round_trips = 0;
  size_t bytes = 0;
  size_t clipped_updates = 0;
  double seconds_keygen = 0.0;
  double seconds_user = 0.0;
  double seconds_provider = 0.0;
  double seconds_total = 0.0;
};

struct TrainCompareReport {
  uint64_t seed = 0;
  size_t iota = 0;
  std::vector<TrainCompareRow> rows;
};

// Trains plain, secure, and mixed models on the same providers and
// scores each on the pooled training records and on the held-out test
// set. The test set must already be normalized like the providers.
TrainCompareReport run_train_compare(const std::vector<Dataset>& providers,
                                     const Dataset& test, size_t iota,
                                     const TrainParams& params,
                                     const std::string& score_method = "kw");

// ---------------------------------------------------------------------------
// Cost model of the split point.

struct IotaSweepPoint {
  size_t iota = 0;
  // User plus provider crypto time, keygen excluded.
  double seconds = 0.0;
  size_t bytes = 0;
  size_t round_trips = 0;
  size_t iterations = 0;
};

struct IotaSweepReport {
  std::vector<IotaSweepPoint> points;
  // Least-squares fit seconds = slope * (iota + 1) + intercept: each
  // encrypted column costs the same and the bias column always rides
  // the encrypted path.
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

IotaSweepReport run_iota_sweep(const std::vector<Dataset>& providers,
                               const std::vector<size_t>& iotas,
                               const TrainParams& params,
                               const std::string& score_method = "kw");

// ---------------------------------------------------------------------------
// JSON renderings of the reports and of one trained model, two-space
// indented, stable key order.

std::string publish_report_json(const PublishReport& report);
std::string dp_sweep_json(const DpSweepReport& report);
std::string block_bench_json(const std::vector<BlockBenchRow>& rows);
std::string train_compare_json(const TrainCompareReport& report);
std::string iota_sweep_json(const IotaSweepReport& report);
std::string scores_json(const FeatureScores& scores);
std::string model_json(const TrainResult& result, const std::string& mode,
                       size_t iota, const TrainParams& params,
                       const std::vector<std::string>& attribute_names);
std::string metrics_json(const TrainResult& result, double accuracy_train,
                         double accuracy_test);

}  // namespace heda
