#include "heda/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <utility>

#include "heda/errors.hpp"
#include "heda/protocols.hpp"

namespace heda {

namespace {

using Json = nlohmann::ordered_json;

uint64_t mix_run_seed(uint64_t seed, size_t run) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<uint64_t>(run) + 1));
}

Json publish_report_obj(const PublishReport& report) {
  Json out;
  out["cluster_size"] = report.cluster_size;
  out["runs"] = report.runs;
  out["dataset_epsilon"] = report.dataset_epsilon;
  Json rows = Json::array();
  for (const AttributeBudgetRow& row : report.attributes) {
    Json r;
    r["name"] = row.name;
    r["epsilon"] = row.epsilon;
    r["delta_f"] = row.delta_f;
    r["delta_f_prime"] = row.delta_f_prime;
    rows.push_back(std::move(r));
  }
  out["attributes"] = std::move(rows);
  out["sse"] = Json{{"ima", report.sse_ima}, {"standard", report.sse_standard}};
  out["record_linkage"] =
      Json{{"ima", report.linkage_ima}, {"standard", report.linkage_standard}};
  return out;
}

Json wall_time_obj(const TrainResult& result) {
  Json out;
  out["keygen"] = result.seconds_keygen;
  out["user"] = result.seconds_user;
  out["provider"] = result.seconds_provider;
  out["total"] = result.seconds_total;
  return out;
}

std::string render(const Json& value) { return value.dump(2) + "\n"; }

}  // namespace

Dataset synthesize_logistic(size_t m, size_t d, uint64_t seed) {
  if (m == 0 || d == 0) {
    throw ParamError("synthesize: need at least one record and attribute");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weights(d);
  for (size_t j = 0; j < d; ++j) {
    double magnitude =
        4.0 * static_cast<double>(d - j) / static_cast<double>(d);
    weights[j] = (j % 2 == 0) ? magnitude : -magnitude;
  }
  // Centering the bias on the attribute means keeps the classes roughly
  // balanced.
  double bias = 0.0;
  for (double w : weights) bias -= w / 2.0;

  Dataset data;
  data.attributes.resize(d);
  for (size_t j = 0; j < d; ++j) {
    data.attributes[j].name = "x" + std::to_string(j);
  }
  data.records.reserve(m);
  data.labels.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    std::vector<double> row(d);
    double margin = bias;
    for (size_t j = 0; j < d; ++j) {
      row[j] = unit(rng);
      margin += weights[j] * row[j];
    }
    data.labels.push_back(unit(rng) < sigmoid(margin) ? 1 : 0);
    data.records.push_back(std::move(row));
  }
  data.refresh_ranges();
  return data;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw DimensionError("fit: x and y lengths differ");
  }
  if (x.empty()) {
    throw DimensionError("fit: no points");
  }
  LineFit fit;
  size_t n = x.size();
  if (n == 1) {
    fit.intercept = y[0];
    fit.r_squared = 1.0;
    return fit;
  }
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mean_x;
    double dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = (sxx == 0.0) ? 0.0 : sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = (syy == 0.0) ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

Dataset normalize_like(const Dataset& data, const Dataset& reference) {
  if (data.dim() != reference.dim()) {
    throw DimensionError("normalize_like: dimension mismatch");
  }
  Dataset out = data;
  for (size_t j = 0; j < out.dim(); ++j) {
    double lo = reference.attributes[j].min;
    double span = reference.attributes[j].max - lo;
    for (std::vector<double>& row : out.records) {
      row[j] = (span == 0.0) ? 0.0 : (row[j] - lo) / span;
    }
  }
  out.refresh_ranges();
  return out;
}

Dataset pool_records(const std::vector<Dataset>& slices) {
  if (slices.empty()) {
    throw DimensionError("pool: no slices");
  }
  Dataset all = slices.front();
  for (size_t p = 1; p < slices.size(); ++p) {
    const Dataset& part = slices[p];
    if (part.dim() != all.dim()) {
      throw DimensionError("pool: slices disagree on dimension");
    }
    all.records.insert(all.records.end(), part.records.begin(),
                       part.records.end());
    all.labels.insert(all.labels.end(), part.labels.begin(),
                      part.labels.end());
  }
  all.refresh_ranges();
  return all;
}

void save_csv(const Dataset& data, const std::string& label_column,
              const std::string& path) {
  if (data.labels.size() != data.records.size()) {
    throw DimensionError("save: one label per record required");
  }
  std::ofstream out(path);
  if (!out) {
    throw ParseError("save: cannot open " + path + " for writing");
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const AttributeInfo& attr : data.attributes) {
    out << attr.name << ',';
  }
  out << label_column << '\n';
  for (size_t i = 0; i < data.records.size(); ++i) {
    for (double v : data.records[i]) {
      out << v << ',';
    }
    out << data.labels[i] << '\n';
  }
  if (!out.good()) {
    throw ParseError("save: write to " + path + " failed");
  }
}

PublishReport run_publish_report(const Dataset& data, size_t cluster_size,
                                 size_t runs, uint64_t seed) {
  if (runs == 0) {
    throw ParamError("publish report: runs must be positive");
  }
  EpsilonBudget budget = select_epsilon(data);
  PublishReport report;
  report.cluster_size = cluster_size;
  report.runs = runs;
  report.dataset_epsilon = budget.dataset_epsilon();
  for (size_t r = 0; r < runs; ++r) {
    uint64_t run_seed = mix_run_seed(seed, r);
    NoisedDataset clustered = publish_ima_dp(data, cluster_size, budget,
                                             run_seed);
    NoisedDataset baseline = publish_standard_dp(data, budget, run_seed);
    report.sse_ima += sse(data, clustered.data);
    report.sse_standard += sse(data, baseline.data);
    report.linkage_ima += record_linkage(data, clustered.data);
    report.linkage_standard += record_linkage(data, baseline.data);
    if (r == 0) {
      for (size_t j = 0; j < data.dim(); ++j) {
        report.attributes.push_back({data.attributes[j].name,
                                     clustered.epsilon[j],
                                     clustered.delta_f[j],
                                     clustered.delta_f_prime[j]});
      }
    }
  }
  double n = static_cast<double>(runs);
  report.sse_ima /= n;
  report.sse_standard /= n;
  report.linkage_ima /= n;
  report.linkage_standard /= n;
  return report;
}

DpSweepReport run_dp_sweep(const Dataset& data,
                           const std::vector<size_t>& cluster_sizes,
                           size_t runs, uint64_t seed) {
  if (cluster_sizes.empty()) {
    throw ParamError("dp sweep: no cluster sizes");
  }
  DpSweepReport report;
  report.runs = runs;
  report.recommended_cluster_size = best_cluster_size(data.size());
  for (size_t k : cluster_sizes) {
    report.points.push_back(run_publish_report(data, k, runs, seed));
  }
  report.dataset_epsilon = report.points.front().dataset_epsilon;
  return report;
}

std::vector<BlockBenchRow> run_block_bench(unsigned key_bits, size_t payload,
                                           size_t repetitions, uint64_t seed) {
  if (payload == 0) {
    throw ParamError("block bench: payload must be positive");
  }
  if (repetitions == 0) {
    throw ParamError("block bench: repetitions must be positive");
  }
  BigRng rng(seed ^ 0x62656E63685F726EULL);
  Party alice = make_party(Role::kAlice, key_bits, key_bits, rng);
  Party bob = make_party(Role::kBob, key_bits, key_bits, rng);
  introduce(alice, bob);
  std::mt19937_64 pick(seed ^ 0x62656E63685F3634ULL);

  auto grid = [&pick](size_t n) {
    std::vector<double> v(n);
    for (double& x : v) {
      x = static_cast<double>(1 + pick() % 100) / 100.0;
    }
    return v;
  };

  struct Shape {
    ProtocolId id;
    const char* name;
    size_t count;
    bool integer_b;
  };
  // The exponent product carries count * (1 + ln 100) nats at most, so
  // the exponentiation blocks stay well under even a 512-bit modulus by
  // capping the vector length at eight.
  size_t pow_count = payload < 8 ? payload : 8;
  const Shape shapes[] = {
      {ProtocolId::kSecureAdd, "add", payload, false},
      {ProtocolId::kSecureSub, "subtract", payload, false},
      {ProtocolId::kSecureDot, "dot", payload, false},
      {ProtocolId::kSecureMul, "multiply", 1, false},
      {ProtocolId::kSecurePow, "power", pow_count, true},
      {ProtocolId::kConvert, "convert", 1, true},
      {ProtocolId::kRekey, "rekey", 1, false},
  };

  std::vector<BlockBenchRow> rows;
  for (const Shape& shape : shapes) {
    BlockBenchRow row;
    row.id = shape.id;
    row.name = shape.name;
    row.payload = shape.count;
    row.repetitions = repetitions;

    ProtocolRun last;
    double total_ms = 0.0;
    for (size_t rep = 0; rep < repetitions; ++rep) {
      std::vector<double> a = grid(shape.count);
      std::vector<double> b(shape.count);
      if (shape.integer_b) {
        for (double& e : b) e = static_cast<double>(1 + pick() % 2);
      } else {
        b = grid(shape.count);
      }
      auto t0 = std::chrono::steady_clock::now();
      last = run_protocol(shape.id, alice, a, bob, b, rng);
      auto t1 = std::chrono::steady_clock::now();
      total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    row.millis_mean = total_ms / static_cast<double>(repetitions);

    bool any = false;
    Role prev = Role::kAlice;
    for (const Message& msg : last.transcript.messages) {
      if (msg.protocol_id != shape.id) continue;
      row.bytes += msg.wire_size();
      if (any && prev == Role::kBob && msg.sender == Role::kAlice) {
        ++row.round_trips;
      }
      prev = msg.sender;
      any = true;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

TrainCompareReport run_train_compare(const std::vector<Dataset>& providers,
                                     const Dataset& test, size_t iota,
                                     const TrainParams& params,
                                     const std::string& score_method) {
  Dataset pooled = pool_records(providers);
  TrainCompareReport report;
  report.seed = params.seed;
  report.iota = iota;

  auto add_row = [&](const std::string& mode, size_t row_iota,
                     const TrainResult& result) {
    TrainCompareRow row;
    row.mode = mode;
    row.iota = row_iota;
    row.accuracy_train = accuracy(result.beta, pooled);
    row.accuracy_test = accuracy(result.beta, test);
    row.iterations = result.iterations;
    row.round_trips = result.round_trips;
    row.bytes = result.bytes;
    row.clipped_updates = result.clipped_updates;
    row.seconds_keygen = result.seconds_keygen;
    row.seconds_user = result.seconds_user;
    row.seconds_provider = result.seconds_provider;
    row.seconds_total = result.seconds_total;
    report.rows.push_back(std::move(row));
  };

  size_t d = pooled.dim();
  add_row("plain", d, plaintext_lr_train(pooled, params));
  add_row("secure", d, secure_lr_train(providers, params));
  add_row("heda", iota, heda_train(providers, iota, params, score_method));
  return report;
}

IotaSweepReport run_iota_sweep(const std::vector<Dataset>& providers,
                               const std::vector<size_t>& iotas,
                               const TrainParams& params,
                               const std::string& score_method) {
  if (iotas.empty()) {
    throw ParamError("iota sweep: no split points");
  }
  TrainParams run_params = params;
  run_params.capture = nullptr;
  IotaSweepReport report;
  std::vector<double> xs;
  std::vector<double> ys;
  for (size_t iota : iotas) {
    TrainResult result = heda_train(providers, iota, run_params, score_method);
    IotaSweepPoint point;
    point.iota = iota;
    point.seconds = result.seconds_user + result.seconds_provider;
    point.bytes = result.bytes;
    point.round_trips = result.round_trips;
    point.iterations = result.iterations;
    xs.push_back(static_cast<double>(iota + 1));
    ys.push_back(point.seconds);
    report.points.push_back(point);
  }
  LineFit fit = fit_line(xs, ys);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.r_squared = fit.r_squared;
  return report;
}

std::string publish_report_json(const PublishReport& report) {
  return render(publish_report_obj(report));
}

std::string dp_sweep_json(const DpSweepReport& report) {
  Json out;
  out["runs"] = report.runs;
  out["recommended_cluster_size"] = report.recommended_cluster_size;
  out["dataset_epsilon"] = report.dataset_epsilon;
  Json points = Json::array();
  for (const PublishReport& point : report.points) {
    points.push_back(publish_report_obj(point));
  }
  out["points"] = std::move(points);
  return render(out);
}

std::string block_bench_json(const std::vector<BlockBenchRow>& rows) {
  Json blocks = Json::array();
  for (const BlockBenchRow& row : rows) {
    Json r;
    r["id"] = static_cast<int>(row.id);
    r["name"] = row.name;
    r["payload"] = row.payload;
    r["repetitions"] = row.repetitions;
    r["millis_mean"] = row.millis_mean;
    r["bytes"] = row.bytes;
    r["round_trips"] = row.round_trips;
    blocks.push_back(std::move(r));
  }
  Json out;
  out["blocks"] = std::move(blocks);
  return render(out);
}

std::string train_compare_json(const TrainCompareReport& report) {
  Json out;
  out["seed"] = report.seed;
  out["iota"] = report.iota;
  Json rows = Json::array();
  for (const TrainCompareRow& row : report.rows) {
    Json r;
    r["mode"] = row.mode;
    r["iota"] = row.iota;
    r["accuracy"] =
        Json{{"train", row.accuracy_train}, {"test", row.accuracy_test}};
    r["iterations"] = row.iterations;
    r["round_trips"] = row.round_trips;
    r["bytes"] = row.bytes;
    r["clipped_updates"] = row.clipped_updates;
    Json wall;
    wall["keygen"] = row.seconds_keygen;
    wall["user"] = row.seconds_user;
    wall["provider"] = row.seconds_provider;
    wall["total"] = row.seconds_total;
    r["wall_time"] = std::move(wall);
    rows.push_back(std::move(r));
  }
  out["rows"] = std::move(rows);
  return render(out);
}

std::string iota_sweep_json(const IotaSweepReport& report) {
  Json points = Json::array();
  for (const IotaSweepPoint& point : report.points) {
    Json p;
    p["iota"] = point.iota;
    p["seconds"] = point.seconds;
    p["bytes"] = point.bytes;
    p["round_trips"] = point.round_trips;
    p["iterations"] = point.iterations;
    points.push_back(std::move(p));
  }
  Json out;
  out["points"] = std::move(points);
  out["fit"] = Json{{"slope", report.slope},
                    {"intercept", report.intercept},
                    {"r_squared", report.r_squared}};
  return render(out);
}

std::string scores_json(const FeatureScores& scores) {
  Json out;
  out["method"] = scores.method;
  out["scores"] = scores.scores;
  out["ranking"] = scores.ranking;
  return render(out);
}

std::string model_json(const TrainResult& result, const std::string& mode,
                       size_t iota, const TrainParams& params,
                       const std::vector<std::string>& attribute_names) {
  if (result.beta.size() != attribute_names.size() + 1) {
    throw DimensionError("model: beta and attribute names disagree");
  }
  Json out;
  out["mode"] = mode;
  out["iota"] = iota;
  out["attributes"] = attribute_names;
  out["coefficients"] = std::vector<double>(result.beta.begin(),
                                            result.beta.end() - 1);
  out["bias"] = result.beta.back();
  Json hyper;
  hyper["alpha"] = params.alpha;
  hyper["cycles"] = params.cycles;
  hyper["min_update"] = params.min_update;
  hyper["key_bits"] = params.key_bits;
  hyper["seed"] = params.seed;
  out["hyperparameters"] = std::move(hyper);
  return render(out);
}

std::string metrics_json(const TrainResult& result, double accuracy_train,
                         double accuracy_test) {
  Json out;
  out["accuracy"] = Json{{"train", accuracy_train}, {"test", accuracy_test}};
  out["iterations"] = result.iterations;
  out["round_trips"] = result.round_trips;
  out["bytes"] = result.bytes;
  out["clipped_updates"] = result.clipped_updates;
  out["wall_time"] = wall_time_obj(result);
  return render(out);
}

}  // namespace heda
