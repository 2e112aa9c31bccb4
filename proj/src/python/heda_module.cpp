#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heda/crypto.hpp"
#include "heda/dataset.hpp"
#include "heda/dp.hpp"
#include "heda/errors.hpp"
#include "heda/features.hpp"
#include "heda/harness.hpp"
#include "heda/training.hpp"

namespace py = pybind11;

namespace {

heda::Dataset make_dataset(std::vector<std::vector<double>> records,
                           std::vector<int> labels,
                           std::optional<std::vector<std::string>> names) {
  heda::Dataset data;
  data.records = std::move(records);
  data.labels = std::move(labels);
  if (data.records.empty()) {
    throw heda::ParamError("dataset: no records");
  }
  if (data.labels.size() != data.records.size()) {
    throw heda::DimensionError("dataset: one label per record required");
  }
  size_t d = data.records.front().size();
  for (const std::vector<double>& row : data.records) {
    if (row.size() != d) {
      throw heda::DimensionError("dataset: ragged rows");
    }
  }
  std::vector<std::string> use =
      names.has_value() ? std::move(*names) : std::vector<std::string>();
  if (!use.empty() && use.size() != d) {
    throw heda::DimensionError("dataset: one name per attribute required");
  }
  data.attributes.resize(d);
  for (size_t j = 0; j < d; ++j) {
    data.attributes[j].name = use.empty() ? "x" + std::to_string(j) : use[j];
  }
  data.refresh_ranges();
  return data;
}

std::vector<std::string> attribute_names(const heda::Dataset& data) {
  std::vector<std::string> out;
  out.reserve(data.dim());
  for (const heda::AttributeInfo& attr : data.attributes) {
    out.push_back(attr.name);
  }
  return out;
}

heda::TrainParams make_params(double alpha, size_t cycles, double min_update,
                              unsigned key_bits, uint64_t seed) {
  heda::TrainParams params;
  params.alpha = alpha;
  params.cycles = cycles;
  params.min_update = min_update;
  params.key_bits = key_bits;
  params.seed = seed;
  return params;
}

py::dict result_dict(const heda::TrainResult& result) {
  py::dict out;
  out["beta"] = result.beta;
  out["iterations"] = result.iterations;
  out["round_trips"] = result.round_trips;
  out["bytes"] = result.bytes;
  out["clipped_updates"] = result.clipped_updates;
  py::dict wall;
  wall["keygen"] = result.seconds_keygen;
  wall["user"] = result.seconds_user;
  wall["provider"] = result.seconds_provider;
  wall["total"] = result.seconds_total;
  out["wall_time"] = wall;
  return out;
}

}  // namespace

PYBIND11_MODULE(_heda, m) {
  m.doc() =
      "Logistic regression over distributed private data: encrypted "
      "gradient aggregation for sensitive attributes, calibrated noise "
      "for the rest. Report helpers return JSON strings.";

  py::register_exception<heda::Error>(m, "HedaError");

  py::class_<heda::Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("records"), py::arg("labels"),
           py::arg("names") = py::none())
      .def_property_readonly(
          "records",
          [](const heda::Dataset& d) { return d.records; })
      .def_property_readonly("labels",
                             [](const heda::Dataset& d) { return d.labels; })
      .def_property_readonly("names", &attribute_names)
      .def_property_readonly("dim", &heda::Dataset::dim)
      .def("__len__", &heda::Dataset::size)
      .def("__repr__", [](const heda::Dataset& d) {
        return "Dataset(" + std::to_string(d.size()) + " records, " +
               std::to_string(d.dim()) + " attributes)";
      });

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& label,
         std::vector<std::string> discrete) {
        heda::CsvSchema schema;
        schema.label_column = label;
        schema.discrete_columns = std::move(discrete);
        return heda::load_csv(path, schema);
      },
      py::arg("path"), py::arg("label") = "label",
      py::arg("discrete") = std::vector<std::string>());
  m.def("save_csv", &heda::save_csv, py::arg("data"), py::arg("label"),
        py::arg("path"));
  m.def("synthesize_logistic", &heda::synthesize_logistic, py::arg("m"),
        py::arg("d"), py::arg("seed"));
  m.def("min_max_normalize", &heda::min_max_normalize, py::arg("data"));
  m.def("normalize_like", &heda::normalize_like, py::arg("data"),
        py::arg("reference"));
  m.def("split_train_test", &heda::split_train_test, py::arg("data"),
        py::arg("fraction"), py::arg("seed"));
  m.def("pool_records", &heda::pool_records, py::arg("slices"));

  m.def(
      "score_features",
      [](const heda::Dataset& data, const std::string& method) {
        heda::FeatureScores scores = heda::score_features(data, method);
        py::dict out;
        out["method"] = scores.method;
        out["scores"] = scores.scores;
        out["ranking"] = scores.ranking;
        return out;
      },
      py::arg("data"), py::arg("method") = "kw");

  m.def(
      "train",
      [](const std::vector<heda::Dataset>& providers, const std::string& mode,
         size_t iota, const std::string& method, double alpha, size_t cycles,
         double min_update, unsigned key_bits, uint64_t seed) {
        heda::TrainParams params =
            make_params(alpha, cycles, min_update, key_bits, seed);
        heda::TrainResult result;
        if (mode == "plain") {
          result =
              heda::plaintext_lr_train(heda::pool_records(providers), params);
        } else if (mode == "secure") {
          result = heda::secure_lr_train(providers, params);
        } else if (mode == "heda") {
          if (iota == 0) {
            throw heda::ParamError("mode heda needs iota >= 1");
          }
          result = heda::heda_train(providers, iota, params, method);
        } else {
          throw heda::ParamError("mode must be plain, secure, or heda");
        }
        return result_dict(result);
      },
      py::arg("providers"), py::arg("mode") = "plain", py::arg("iota") = 0,
      py::arg("method") = "kw", py::arg("alpha") = 0.1,
      py::arg("cycles") = 100, py::arg("min_update") = 1e-4,
      py::arg("key_bits") = 2048, py::arg("seed") = 0);

  m.def("accuracy", &heda::accuracy, py::arg("beta"), py::arg("data"));
  m.def("predict_label", &heda::predict_label, py::arg("beta"), py::arg("x"));
  m.def("sigmoid", &heda::sigmoid, py::arg("z"));

  m.def(
      "publish_report_json",
      [](const heda::Dataset& data, size_t cluster_size, size_t runs,
         uint64_t seed) {
        size_t k = cluster_size > 0 ? cluster_size
                                    : heda::best_cluster_size(data.size());
        return heda::publish_report_json(
            heda::run_publish_report(data, k, runs, seed));
      },
      py::arg("data"), py::arg("cluster_size") = 0, py::arg("runs") = 1,
      py::arg("seed") = 0);
  m.def(
      "dp_sweep_json",
      [](const heda::Dataset& data, const std::vector<size_t>& cluster_sizes,
         size_t runs, uint64_t seed) {
        return heda::dp_sweep_json(
            heda::run_dp_sweep(data, cluster_sizes, runs, seed));
      },
      py::arg("data"), py::arg("cluster_sizes"), py::arg("runs") = 1,
      py::arg("seed") = 0);
  m.def(
      "block_bench_json",
      [](unsigned key_bits, size_t payload, size_t repetitions,
         uint64_t seed) {
        return heda::block_bench_json(
            heda::run_block_bench(key_bits, payload, repetitions, seed));
      },
      py::arg("key_bits") = 512, py::arg("payload") = 8,
      py::arg("repetitions") = 3, py::arg("seed") = 0);
  m.def(
      "iota_sweep_json",
      [](const std::vector<heda::Dataset>& providers,
         const std::vector<size_t>& iotas, const std::string& method,
         double alpha, size_t cycles, double min_update, unsigned key_bits,
         uint64_t seed) {
        heda::TrainParams params =
            make_params(alpha, cycles, min_update, key_bits, seed);
        return heda::iota_sweep_json(
            heda::run_iota_sweep(providers, iotas, params, method));
      },
      py::arg("providers"), py::arg("iotas"), py::arg("method") = "kw",
      py::arg("alpha") = 0.1, py::arg("cycles") = 3,
      py::arg("min_update") = 1e-4, py::arg("key_bits") = 512,
      py::arg("seed") = 0);

  m.def(
      "paillier_keygen_json",
      [](unsigned bits, uint64_t seed) {
        heda::BigRng rng(seed);
        heda::PaillierKey key = heda::paillier_keygen(bits, rng);
        return py::make_tuple(heda::paillier_key_to_json(key, true),
                              heda::paillier_key_to_json(key, false));
      },
      py::arg("bits") = 2048, py::arg("seed") = 0);
  m.def(
      "rsa_keygen_json",
      [](unsigned bits, uint64_t seed) {
        heda::BigRng rng(seed);
        heda::RsaKey key = heda::rsa_keygen(bits, rng);
        return py::make_tuple(heda::rsa_key_to_json(key, true),
                              heda::rsa_key_to_json(key, false));
      },
      py::arg("bits") = 2048, py::arg("seed") = 0);
}
