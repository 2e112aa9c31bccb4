#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace heda {

enum class AttributeKind { kNumeric, kDiscrete };

// Per-column metadata. Discrete columns carry the string-to-code map used
// during ingestion so a report can translate codes back to source values.
struct AttributeInfo {
  std::string name;
  AttributeKind kind = AttributeKind::kNumeric;
  std::map<std::string, double> encoding;
  double min = 0.0;
  double max = 0.0;
};

// Rectangular labeled dataset: m records of d real attributes plus a binary
// label per record. All ingestion quirks (encoding, missing rows) are
// resolved before a Dataset exists, so downstream code never sees gaps.
struct Dataset {
  std::vector<std::vector<double>> records;
  std::vector<int> labels;
  std::vector<AttributeInfo> attributes;

  size_t size() const { return records.size(); }
  size_t dim() const { return attributes.size(); }
  std::vector<double> column(size_t j) const;
  void refresh_ranges();
};

// Declares how to read a CSV: which header names the label and which
// columns are discrete. Columns absent from `discrete` are numeric.
struct CsvSchema {
  std::string label_column;
  std::vector<std::string> discrete_columns;
  // Cells matching any of these strings mark the row as incomplete.
  std::vector<std::string> missing_markers = {"", "?", "NA"};
};

struct CsvLoadReport {
  size_t rows_read = 0;
  size_t rows_dropped = 0;
};

// Reads a header-row CSV into a Dataset. Discrete attributes are encoded
// by first appearance order (first distinct value seen becomes 0). Rows
// with missing cells are dropped and counted in the report.
Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 CsvLoadReport* report = nullptr);

// Seeded shuffle, then the first ceil(fraction * m) records become the
// training set and the remainder the test set.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double fraction, uint64_t seed);

// Maps every attribute into [0, 1] by its own min and max. Constant
// columns map to 0.
Dataset min_max_normalize(const Dataset& data);

// Column subset sharing labels with the source, in the given order.
Dataset select_columns(const Dataset& data, const std::vector<size_t>& cols);

// Row subset sharing attribute metadata with the source.
Dataset select_rows(const Dataset& data, const std::vector<size_t>& rows);

}  // namespace heda
