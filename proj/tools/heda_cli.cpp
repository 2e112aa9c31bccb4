#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heda/crypto.hpp"
#include "heda/dataset.hpp"
#include "heda/dp.hpp"
#include "heda/errors.hpp"
#include "heda/features.hpp"
#include "heda/harness.hpp"
#include "heda/training.hpp"

namespace {

// Defaults file: a flat JSON object whose keys are the long option names
// without the leading dashes. Values given on the command line win.
struct Config {
  nlohmann::json values = nlohmann::json::object();

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw heda::ParseError("config: cannot open " + path);
    }
    try {
      in >> values;
    } catch (const nlohmann::json::exception& e) {
      throw heda::ParseError(std::string("config: ") + e.what());
    }
    if (!values.is_object()) {
      throw heda::ParseError("config: top level must be an object");
    }
  }

  template <typename T>
  void apply(const CLI::App& cmd, const std::string& flag, T& var) const {
    if (cmd.count(flag) > 0) {
      return;
    }
    std::string key = flag.substr(2);
    auto it = values.find(key);
    if (it == values.end()) {
      return;
    }
    try {
      var = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw heda::ParseError("config: wrong type for key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return values.contains(key); }
};

struct DataArgs {
  std::vector<std::string> data;
  std::string label = "label";
  std::vector<std::string> discrete;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.data,
                  "input CSV; repeat for one slice per provider");
  cmd->add_option("--label", args.label, "label column name");
  cmd->add_option("--discrete", args.discrete,
                  "discrete column name; repeatable");
}

void apply_data_config(const Config& cfg, const CLI::App& cmd,
                       DataArgs& args) {
  cfg.apply(cmd, "--data", args.data);
  cfg.apply(cmd, "--label", args.label);
  cfg.apply(cmd, "--discrete", args.discrete);
}

heda::CsvSchema schema_for(const DataArgs& args) {
  heda::CsvSchema schema;
  schema.label_column = args.label;
  schema.discrete_columns = args.discrete;
  return schema;
}

std::vector<heda::Dataset> load_slices(const DataArgs& args) {
  if (args.data.empty()) {
    throw heda::ParamError("no input: pass --data");
  }
  heda::CsvSchema schema = schema_for(args);
  std::vector<heda::Dataset> out;
  for (const std::string& path : args.data) {
    heda::CsvLoadReport report;
    out.push_back(heda::load_csv(path, schema, &report));
    if (report.rows_dropped > 0) {
      std::cerr << path << ": dropped " << report.rows_dropped
                << " incomplete rows\n";
    }
  }
  return out;
}

heda::Dataset load_single(const DataArgs& args, const char* command) {
  std::vector<heda::Dataset> slices = load_slices(args);
  if (slices.size() != 1) {
    throw heda::ParamError(std::string(command) +
                           ": takes exactly one --data file");
  }
  return std::move(slices.front());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw heda::ParseError("cannot open " + path + " for writing");
  }
  out << text;
  if (!out.good()) {
    throw heda::ParseError("write to " + path + " failed");
  }
}

std::vector<size_t> parse_size_list(const std::string& text,
                                    const char* what) {
  std::vector<size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(part, &pos);
    } catch (const std::exception&) {
      throw heda::ParamError(std::string(what) + ": '" + part +
                             "' is not a number");
    }
    if (pos != part.size()) {
      throw heda::ParamError(std::string(what) + ": '" + part +
                             "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw heda::ParamError(std::string(what) + ": empty list");
  }
  return out;
}

// ---------------------------------------------------------------------------
// keygen

struct KeygenArgs {
  std::string config;
  std::string scheme = "both";
  unsigned bits = 2048;
  uint64_t seed = 0;
  std::string out = "key";
};

void run_keygen(const CLI::App& cmd, KeygenArgs& args) {
  Config cfg;
  if (!args.config.empty()) cfg.load(args.config);
  cfg.apply(cmd, "--scheme", args.scheme);
  cfg.apply(cmd, "--bits", args.bits);
  cfg.apply(cmd, "--seed", args.seed);
  cfg.apply(cmd, "--out", args.out);

  bool paillier = args.scheme == "paillier" || args.scheme == "both";
  bool rsa = args.scheme == "rsa" || args.scheme == "both";
  if (!paillier && !rsa) {
    throw heda::ParamError("scheme must be paillier, rsa, or both");
  }
  if (cmd.count("--seed") == 0 && !cfg.has("seed")) {
    std::random_device entropy;
    args.seed = (static_cast<uint64_t>(entropy()) << 32) ^ entropy();
  }
  heda::BigRng rng(args.seed);

  auto announce = [](const char* scheme, uint64_t key_id,
                     const std::string& path) {
    std::cout << scheme << " key " << std::hex << std::setw(16)
              << std::setfill('0') << key_id << std::dec << std::setfill(' ')
              << " -> " << path << " (secret), " << path.substr(0, path.size() - 5)
              << ".pub.json (public)\n";
  };
  if (paillier) {
    heda::PaillierKey key = heda::paillier_keygen(args.bits, rng);
    std::string path = args.out + ".paillier.json";
    write_file(path, heda::paillier_key_to_json(key, true));
    write_file(args.out + ".paillier.pub.json",
               heda::paillier_key_to_json(key, false));
    announce("paillier", key.pub.key_id, path);
  }
  if (rsa) {
    heda::RsaKey key = heda::rsa_keygen(args.bits, rng);
    std::string path = args.out + ".rsa.json";
    write_file(path, heda::rsa_key_to_json(key, true));
    write_file(args.out + ".rsa.pub.json", heda::rsa_key_to_json(key, false));
    announce("rsa", key.pub.key_id, path);
  }
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string config;
  DataArgs data;
  std::string method = "kw";
  std::string out = "scores.json";
};

void run_score(const CLI::App& cmd, ScoreArgs& args) {
  Config cfg;
  if (!args.config.empty()) cfg.load(args.config);
  apply_data_config(cfg, cmd, args.data);
  cfg.apply(cmd, "--method", args.method);
  cfg.apply(cmd, "--out", args.out);

  std::vector<heda::Dataset> slices = load_slices(args.data);
  std::vector<heda::FeatureScores> per_slice;
  per_slice.reserve(slices.size());
  for (const heda::Dataset& slice : slices) {
    per_slice.push_back(heda::score_features(slice, args.method));
  }
  heda::FeatureScores scores = per_slice.size() == 1
                                   ? per_slice.front()
                                   : heda::negotiate_scores(per_slice);
  write_file(args.out, heda::scores_json(scores));

  const heda::Dataset& first = slices.front();
  std::cout << "method " << scores.method << ", " << slices.size()
            << " slice(s)\n";
  for (size_t rank = 0; rank < scores.ranking.size(); ++rank) {
    size_t j = scores.ranking[rank];
    std::cout << std::setw(3) << rank + 1 << ". "
              << first.attributes[j].name << "  " << scores.scores[j] << "\n";
  }
  std::cout << "wrote " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// dp-publish

struct PublishArgs {
  std::string config;
  DataArgs data;
  size_t cluster_size = 0;
  size_t runs = 1;
  uint64_t seed = 0;
  std::string mechanism = "ima";
  std::string out_report = "report.json";
  std::string out_data;
};

void run_publish(const CLI::App& cmd, PublishArgs& args) {
  Config cfg;
  if (!args.config.empty()) cfg.load(args.config);
  apply_data_config(cfg, cmd, args.data);
  cfg.apply(cmd, "--cluster-size", args.cluster_size);
  cfg.apply(cmd, "--runs", args.runs);
  cfg.apply(cmd, "--seed", args.seed);
  cfg.apply(cmd, "--mechanism", args.mechanism);
  cfg.apply(cmd, "--out-report", args.out_report);
  cfg.apply(cmd, "--out-data", args.out_data);

  heda::Dataset data = load_single(args.data, "dp-publish");
  size_t k = args.cluster_size > 0 ? args.cluster_size
                                   : heda::best_cluster_size(data.size());
  heda::PublishReport report =
      heda::run_publish_report(data, k, args.runs, args.seed);
  write_file(args.out_report, heda::publish_report_json(report));

  std::cout << "records " << data.size() << ", cluster size " << k
            << ", dataset epsilon " << report.dataset_epsilon << "\n";
  std::cout << "sse  ima " << report.sse_ima << "  standard "
            << report.sse_standard << "\n";
  std::cout << "linkage  ima " << report.linkage_ima << "  standard "
            << report.linkage_standard << "\n";
  std::cout << "wrote " << args.out_report << "\n";

  if (!args.out_data.empty()) {
    heda::EpsilonBudget budget = heda::select_epsilon(data);
    heda::NoisedDataset published;
    if (args.mechanism == "ima") {
      published = heda::publish_ima_dp(data, k, budget, args.seed);
    } else if (args.mechanism == "standard") {
      published = heda::publish_standard_dp(data, budget, args.seed);
    } else {
      throw heda::ParamError("mechanism must be ima or standard");
    }
    heda::save_csv(published.data, args.data.label, args.out_data);
    std::cout << "wrote " << args.out_data << " (" << args.mechanism << ")\n";
  }
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config;
  DataArgs data;
  std::string test;
  std::string mode = "heda";
  size_t iota = 0;
  std::string method = "kw";
  double alpha = 0.1;
  size_t cycles = 100;
  double min_update = 1e-4;
  unsigned key_bits = 2048;
  uint64_t seed = 0;
  bool no_normalize = false;
  std::string out_model = "model.json";
  std::string out_metrics = "metrics.json";
};

void run_train(const CLI::App& cmd, TrainArgs& args) {
  Config cfg;
  if (!args.config.empty()) cfg.load(args.config);
  apply_data_config(cfg, cmd, args.data);
  cfg.apply(cmd, "--test", args.test);
  cfg.apply(cmd, "--mode", args.mode);
  cfg.apply(cmd, "--iota", args.iota);
  cfg.apply(cmd, "--method", args.method);
  cfg.apply(cmd, "--alpha", args.alpha);
  cfg.apply(cmd, "--cycles", args.cycles);
  cfg.apply(cmd, "--min-update", args.min_update);
  cfg.apply(cmd, "--key-bits", args.key_bits);
  cfg.apply(cmd, "--seed", args.seed);
  cfg.apply(cmd, "--no-normalize", args.no_normalize);
  cfg.apply(cmd, "--out-model", args.out_model);
  cfg.apply(cmd, "--out-metrics", args.out_metrics);

  std::vector<heda::Dataset> slices = load_slices(args.data);
  heda::Dataset reference = heda::pool_records(slices);
  std::vector<heda::Dataset> providers = slices;
  if (!args.no_normalize) {
    for (heda::Dataset& p : providers) {
      p = heda::normalize_like(p, reference);
    }
  }
  heda::Dataset pooled = heda::pool_records(providers);

  bool has_test = !args.test.empty();
  heda::Dataset test;
  if (has_test) {
    test = heda::load_csv(args.test, schema_for(args.data));
    if (!args.no_normalize) {
      test = heda::normalize_like(test, reference);
    }
  }

  heda::TrainParams params;
  params.alpha = args.alpha;
  params.cycles = args.cycles;
  params.min_update = args.min_update;
  params.key_bits = args.key_bits;
  params.seed = args.seed;

  heda::TrainResult result;
  size_t iota_out = reference.dim();
  if (args.mode == "plain") {
    result = heda::plaintext_lr_train(pooled, params);
  } else if (args.mode == "secure") {
    result = heda::secure_lr_train(providers, params);
  } else if (args.mode == "heda") {
    if (args.iota == 0) {
      throw heda::ParamError("mode heda needs --iota between 1 and " +
                             std::to_string(reference.dim()));
    }
    result = heda::heda_train(providers, args.iota, params, args.method);
    iota_out = args.iota;
  } else {
    throw heda::ParamError("mode must be plain, secure, or heda");
  }

  double acc_train = heda::accuracy(result.beta, pooled);
  double acc_test =
      has_test ? heda::accuracy(result.beta, test) : std::nan("");

  std::vector<std::string> names;
  names.reserve(reference.dim());
  for (const heda::AttributeInfo& attr : reference.attributes) {
    names.push_back(attr.name);
  }
  write_file(args.out_model,
             heda::model_json(result, args.mode, iota_out, params, names));
  write_file(args.out_metrics,
             heda::metrics_json(result, acc_train, acc_test));

  std::cout << "mode " << args.mode << ", " << providers.size()
            << " provider(s), " << pooled.size() << " records, "
            << reference.dim() << " attributes";
  if (args.mode == "heda") std::cout << ", iota " << iota_out;
  std::cout << "\n";
  std::cout << "iterations " << result.iterations << ", train accuracy "
            << acc_train;
  if (has_test) std::cout << ", test accuracy " << acc_test;
  std::cout << "\n";
  if (args.mode != "plain") {
    std::cout << "round trips " << result.round_trips << ", bytes "
              << result.bytes << ", wall " << result.seconds_total << " s\n";
  }
  std::cout << "wrote " << args.out_model << ", " << args.out_metrics << "\n";
}

// ---------------------------------------------------------------------------
// bench-blocks

struct BenchArgs {
  std::string config;
  unsigned key_bits = 2048;
  size_t payload = 8;
  size_t repetitions = 5;
  uint64_t seed = 0;
  std::string out = "blocks.json";
};

void run_bench(const CLI::App& cmd, BenchArgs& args) {
  Config cfg;
  if (!args.config.empty()) cfg.load(args.config);
  cfg.apply(cmd, "--key-bits", args.key_bits);
  cfg.apply(cmd, "--payload", args.payload);
  cfg.apply(cmd, "--repetitions", args.repetitions);
  cfg.apply(cmd, "--seed", args.seed);
  cfg.apply(cmd, "--out", args.out);

  std::vector<heda::BlockBenchRow> rows = heda::run_block_bench(
      args.key_bits, args.payload, args.repetitions, args.seed);
  write_file(args.out, heda::block_bench_json(rows));

  std::cout << std::left << std::setw(10) << "block" << std::right
            << std::setw(9) << "payload" << std::setw(13) << "round_trips"
            << std::setw(9) << "bytes" << std::setw(12) << "ms/run" << "\n";
  for (const heda::BlockBenchRow& row : rows) {
    std::cout << std::left << std::setw(10) << row.name << std::right
              << std::setw(9) << row.payload << std::setw(13)
              << row.round_trips << std::setw(9) << row.bytes << std::setw(12)
              << std::fixed << std::setprecision(3) << row.millis_mean
              << "\n";
    std::cout.unsetf(std::ios::fixed);
    std::cout << std::setprecision(6);
  }
  std::cout << "wrote " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// sweep-dp

struct SweepDpArgs {
  std::string config;
  DataArgs data;
  std::string cluster_sizes;
  size_t runs = 3;
  uint64_t seed = 0;
  std::string out = "dp_sweep.json";
};

void run_sweep_dp(const CLI::App& cmd, SweepDpArgs& args) {
  Config cfg;
  if (!args.config.empty()) cfg.load(args.config);
  apply_data_config(cfg, cmd, args.data);
  cfg.apply(cmd, "--cluster-sizes", args.cluster_sizes);
  cfg.apply(cmd, "--runs", args.runs);
  cfg.apply(cmd, "--seed", args.seed);
  cfg.apply(cmd, "--out", args.out);

  heda::Dataset data = load_single(args.data, "sweep-dp");
  std::vector<size_t> ks;
  if (args.cluster_sizes.empty()) {
    size_t best = heda::best_cluster_size(data.size());
    if (best / 2 >= 1) ks.push_back(best / 2);
    ks.push_back(best);
    ks.push_back(best * 2);
  } else {
    ks = parse_size_list(args.cluster_sizes, "cluster-sizes");
  }
  heda::DpSweepReport sweep = heda::run_dp_sweep(data, ks, args.runs,
                                                 args.seed);
  write_file(args.out, heda::dp_sweep_json(sweep));

  std::cout << "dataset epsilon " << sweep.dataset_epsilon
            << ", recommended cluster size "
            << sweep.recommended_cluster_size << ", " << sweep.runs
            << " run(s)\n";
  std::cout << std::right << std::setw(4) << "k" << std::setw(14) << "sse_ima"
            << std::setw(14) << "sse_std" << std::setw(12) << "rl_ima"
            << std::setw(12) << "rl_std" << "\n";
  for (const heda::PublishReport& point : sweep.points) {
    std::cout << std::setw(4) << point.cluster_size << std::setw(14)
              << point.sse_ima << std::setw(14) << point.sse_standard
              << std::setw(12) << point.linkage_ima << std::setw(12)
              << point.linkage_standard << "\n";
  }
  std::cout << "wrote " << args.out << "\n";
}

// ---------------------------------------------------------------------------
// sweep-iota

struct SweepIotaArgs {
  std::string config;
  DataArgs data;
  std::string iotas;
  std::string method = "kw";
  double alpha = 0.1;
  size_t cycles = 3;
  double min_update = 1e-4;
  unsigned key_bits = 2048;
  uint64_t seed = 0;
  bool no_normalize = false;
  std::string out = "iota_sweep.json";
};

void run_sweep_iota(const CLI::App& cmd, SweepIotaArgs& args) {
  Config cfg;
  if (!args.config.empty()) cfg.load(args.config);
  apply_data_config(cfg, cmd, args.data);
  cfg.apply(cmd, "--iotas", args.iotas);
  cfg.apply(cmd, "--method", args.method);
  cfg.apply(cmd, "--alpha", args.alpha);
  cfg.apply(cmd, "--cycles", args.cycles);
  cfg.apply(cmd, "--min-update", args.min_update);
  cfg.apply(cmd, "--key-bits", args.key_bits);
  cfg.apply(cmd, "--seed", args.seed);
  cfg.apply(cmd, "--no-normalize", args.no_normalize);
  cfg.apply(cmd, "--out", args.out);

  std::vector<heda::Dataset> slices = load_slices(args.data);
  heda::Dataset reference = heda::pool_records(slices);
  std::vector<heda::Dataset> providers = slices;
  if (!args.no_normalize) {
    for (heda::Dataset& p : providers) {
      p = heda::normalize_like(p, reference);
    }
  }

  std::vector<size_t> iotas;
  if (args.iotas.empty()) {
    for (size_t i = 1; i <= reference.dim(); ++i) iotas.push_back(i);
  } else {
    iotas = parse_size_list(args.iotas, "iotas");
  }

  heda::TrainParams params;
  params.alpha = args.alpha;
  params.cycles = args.cycles;
  params.min_update = args.min_update;
  params.key_bits = args.key_bits;
  params.seed = args.seed;

  heda::IotaSweepReport sweep =
      heda::run_iota_sweep(providers, iotas, params, args.method);
  write_file(args.out, heda::iota_sweep_json(sweep));

  std::cout << std::right << std::setw(6) << "iota" << std::setw(12)
            << "seconds" << std::setw(12) << "bytes" << std::setw(13)
            << "round_trips" << "\n";
  for (const heda::IotaSweepPoint& point : sweep.points) {
    std::cout << std::setw(6) << point.iota << std::setw(12) << point.seconds
              << std::setw(12) << point.bytes << std::setw(13)
              << point.round_trips << "\n";
  }
  std::cout << "fit: seconds = " << sweep.slope << " * (iota + 1) + "
            << sweep.intercept << "  (r^2 " << sweep.r_squared << ")\n";
  std::cout << "wrote " << args.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Joint logistic regression over private provider data: encrypted "
      "gradients for sensitive attributes, calibrated noise for the rest"};
  app.require_subcommand(1);

  KeygenArgs keygen_args;
  CLI::App* keygen = app.add_subcommand(
      "keygen", "generate Paillier and RSA key files");
  keygen->add_option("--config", keygen_args.config, "JSON defaults file");
  keygen->add_option("--scheme", keygen_args.scheme, "paillier, rsa, or both");
  keygen->add_option("--bits", keygen_args.bits, "modulus size");
  keygen->add_option("--seed", keygen_args.seed,
                     "deterministic generation seed");
  keygen->add_option("--out", keygen_args.out, "output path prefix");
  keygen->callback([keygen, &keygen_args] { run_keygen(*keygen, keygen_args); });

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand(
      "score", "rank attributes by class relevance");
  score->add_option("--config", score_args.config, "JSON defaults file");
  add_data_options(score, score_args.data);
  score->add_option("--method", score_args.method,
                    "kw, chi2, pearson, or spearman");
  score->add_option("--out", score_args.out, "scores file");
  score->callback([score, &score_args] { run_score(*score, score_args); });

  PublishArgs publish_args;
  CLI::App* publish = app.add_subcommand(
      "dp-publish", "release a noised copy of a dataset");
  publish->add_option("--config", publish_args.config, "JSON defaults file");
  add_data_options(publish, publish_args.data);
  publish->add_option("--cluster-size", publish_args.cluster_size,
                      "records per cluster; 0 picks floor(sqrt(m/2))");
  publish->add_option("--runs", publish_args.runs,
                      "noising repetitions averaged in the report");
  publish->add_option("--seed", publish_args.seed, "noise seed");
  publish->add_option("--mechanism", publish_args.mechanism,
                      "ima or standard, for --out-data");
  publish->add_option("--out-report", publish_args.out_report, "report file");
  publish->add_option("--out-data", publish_args.out_data,
                      "write the published records as CSV");
  publish->callback(
      [publish, &publish_args] { run_publish(*publish, publish_args); });

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "fit a logistic model across providers");
  train->add_option("--config", train_args.config, "JSON defaults file");
  add_data_options(train, train_args.data);
  train->add_option("--test", train_args.test, "held-out CSV to score");
  train->add_option("--mode", train_args.mode, "plain, secure, or heda");
  train->add_option("--iota", train_args.iota,
                    "encrypted attribute count for mode heda");
  train->add_option("--method", train_args.method,
                    "scoring method for mode heda");
  train->add_option("--alpha", train_args.alpha, "learning rate");
  train->add_option("--cycles", train_args.cycles, "iteration cap");
  train->add_option("--min-update", train_args.min_update,
                    "stop when no weight moves this much");
  train->add_option("--key-bits", train_args.key_bits, "modulus size");
  train->add_option("--seed", train_args.seed, "run seed");
  train->add_flag("--no-normalize", train_args.no_normalize,
                  "data is already in [0, 1]");
  train->add_option("--out-model", train_args.out_model, "model file");
  train->add_option("--out-metrics", train_args.out_metrics, "metrics file");
  train->callback([train, &train_args] { run_train(*train, train_args); });

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench-blocks", "time the seven two-party computation blocks");
  bench->add_option("--config", bench_args.config, "JSON defaults file");
  bench->add_option("--key-bits", bench_args.key_bits, "modulus size");
  bench->add_option("--payload", bench_args.payload,
                    "vector length for the vector blocks");
  bench->add_option("--repetitions", bench_args.repetitions, "runs per block");
  bench->add_option("--seed", bench_args.seed, "input seed");
  bench->add_option("--out", bench_args.out, "report file");
  bench->callback([bench, &bench_args] { run_bench(*bench, bench_args); });

  SweepDpArgs sweep_dp_args;
  CLI::App* sweep_dp = app.add_subcommand(
      "sweep-dp", "compare noising mechanisms across cluster sizes");
  sweep_dp->add_option("--config", sweep_dp_args.config, "JSON defaults file");
  add_data_options(sweep_dp, sweep_dp_args.data);
  sweep_dp->add_option("--cluster-sizes", sweep_dp_args.cluster_sizes,
                       "comma-separated sizes; default brackets the best");
  sweep_dp->add_option("--runs", sweep_dp_args.runs, "noising repetitions");
  sweep_dp->add_option("--seed", sweep_dp_args.seed, "noise seed");
  sweep_dp->add_option("--out", sweep_dp_args.out, "report file");
  sweep_dp->callback(
      [sweep_dp, &sweep_dp_args] { run_sweep_dp(*sweep_dp, sweep_dp_args); });

  SweepIotaArgs sweep_iota_args;
  CLI::App* sweep_iota = app.add_subcommand(
      "sweep-iota", "measure training cost against the encrypted"
                    " attribute count");
  sweep_iota->add_option("--config", sweep_iota_args.config,
                         "JSON defaults file");
  add_data_options(sweep_iota, sweep_iota_args.data);
  sweep_iota->add_option("--iotas", sweep_iota_args.iotas,
                         "comma-separated split points; default 1..d");
  sweep_iota->add_option("--method", sweep_iota_args.method,
                         "scoring method");
  sweep_iota->add_option("--alpha", sweep_iota_args.alpha, "learning rate");
  sweep_iota->add_option("--cycles", sweep_iota_args.cycles, "iteration cap");
  sweep_iota->add_option("--min-update", sweep_iota_args.min_update,
                         "stop when no weight moves this much");
  sweep_iota->add_option("--key-bits", sweep_iota_args.key_bits,
                         "modulus size");
  sweep_iota->add_option("--seed", sweep_iota_args.seed, "run seed");
  sweep_iota->add_flag("--no-normalize", sweep_iota_args.no_normalize,
                       "data is already in [0, 1]");
  sweep_iota->add_option("--out", sweep_iota_args.out, "report file");
  sweep_iota->callback([sweep_iota, &sweep_iota_args] {
    run_sweep_iota(*sweep_iota, sweep_iota_args);
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const heda::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
