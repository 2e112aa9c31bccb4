#include "heda/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "heda/errors.hpp"

namespace heda {

namespace {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

bool parse_number(const std::string& cell, double* out) {
  try {
    size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) return false;
    *out = v;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::vector<double> Dataset::column(size_t j) const {
  std::vector<double> col;
  col.reserve(records.size());
  for (const auto& row : records) col.push_back(row.at(j));
  return col;
}

void Dataset::refresh_ranges() {
  for (size_t j = 0; j < attributes.size(); ++j) {
    double lo = 0.0;
    double hi = 0.0;
    for (size_t i = 0; i < records.size(); ++i) {
      double v = records[i][j];
      if (i == 0 || v < lo) lo = v;
      if (i == 0 || v > hi) hi = v;
    }
    attributes[j].min = lo;
    attributes[j].max = hi;
  }
}

Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 CsvLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw ParseError("csv: cannot open " + path);

  std::string header_line;
  if (!std::getline(in, header_line)) throw ParseError("csv: empty file");
  std::vector<std::string> header = split_csv_line(header_line);

  size_t label_index = header.size();
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] == schema.label_column) label_index = j;
  }
  if (label_index == header.size())
    throw ParseError("csv: label column '" + schema.label_column +
                     "' not in header");

  Dataset data;
  for (size_t j = 0; j < header.size(); ++j) {
    if (j == label_index) continue;
    AttributeInfo info;
    info.name = header[j];
    bool discrete =
        std::find(schema.discrete_columns.begin(),
                  schema.discrete_columns.end(),
                  header[j]) != schema.discrete_columns.end();
    info.kind = discrete ? AttributeKind::kDiscrete : AttributeKind::kNumeric;
    data.attributes.push_back(std::move(info));
  }

  auto is_missing = [&schema](const std::string& cell) {
    return std::find(schema.missing_markers.begin(),
                     schema.missing_markers.end(),
                     cell) != schema.missing_markers.end();
  };

  std::vector<std::string> raw_labels;
  CsvLoadReport local;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++local.rows_read;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    bool missing = false;
    for (const std::string& cell : cells) {
      if (is_missing(cell)) missing = true;
    }
    if (missing) {
      ++local.rows_dropped;
      continue;
    }

    std::vector<double> row;
    size_t attr = 0;
    for (size_t j = 0; j < cells.size(); ++j) {
      if (j == label_index) {
        raw_labels.push_back(cells[j]);
        continue;
      }
      AttributeInfo& info = data.attributes[attr++];
      if (info.kind == AttributeKind::kDiscrete) {
        auto it = info.encoding.find(cells[j]);
        if (it == info.encoding.end()) {
          double code = static_cast<double>(info.encoding.size());
          it = info.encoding.emplace(cells[j], code).first;
        }
        row.push_back(it->second);
      } else {
        double v = 0.0;
        if (!parse_number(cells[j], &v))
          throw ParseError("csv: line " + std::to_string(line_no) +
                           ", column '" + info.name + "': not a number: '" +
                           cells[j] + "'");
        row.push_back(v);
      }
    }
    data.records.push_back(std::move(row));
  }

  if (data.records.empty()) throw ParseError("csv: no usable records in " + path);

  // Labels must be binary. Two distinct source values are accepted and
  // mapped to {0, 1} by ascending order, so files labeled 2/4 or yes/no
  // load without a preprocessing pass.
  std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() != 2)
    throw ParseError("csv: label column has " +
                     std::to_string(distinct.size()) +
                     " distinct values, need exactly 2");
  std::vector<std::string> ordered(distinct.begin(), distinct.end());
  double v0 = 0.0;
  double v1 = 0.0;
  if (parse_number(ordered[0], &v0) && parse_number(ordered[1], &v1) &&
      v0 > v1) {
    std::swap(ordered[0], ordered[1]);
  }
  for (const std::string& raw : raw_labels)
    data.labels.push_back(raw == ordered[1] ? 1 : 0);

  data.refresh_ranges();
  if (report) *report = local;
  return data;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             double fraction, uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0)
    throw ParamError("split: fraction must lie strictly between 0 and 1");
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  size_t train_size = static_cast<size_t>(
      std::ceil(fraction * static_cast<double>(data.size())));
  std::vector<size_t> train_rows(order.begin(), order.begin() + train_size);
  std::vector<size_t> test_rows(order.begin() + train_size, order.end());
  Dataset train = select_rows(data, train_rows);
  Dataset test = select_rows(data, test_rows);
  train.refresh_ranges();
  test.refresh_ranges();
  return {std::move(train), std::move(test)};
}

Dataset min_max_normalize(const Dataset& data) {
  Dataset out = data;
  for (size_t j = 0; j < out.dim(); ++j) {
    double lo = out.attributes[j].min;
    double span = out.attributes[j].max - lo;
    for (auto& row : out.records)
      row[j] = span > 0.0 ? (row[j] - lo) / span : 0.0;
  }
  out.refresh_ranges();
  return out;
}

Dataset select_columns(const Dataset& data, const std::vector<size_t>& cols) {
  Dataset out;
  out.labels = data.labels;
  for (size_t j : cols) {
    if (j >= data.dim()) throw DimensionError("select_columns: index out of range");
    out.attributes.push_back(data.attributes[j]);
  }
  out.records.reserve(data.size());
  for (const auto& row : data.records) {
    std::vector<double> picked;
    picked.reserve(cols.size());
    for (size_t j : cols) picked.push_back(row[j]);
    out.records.push_back(std::move(picked));
  }
  return out;
}

Dataset select_rows(const Dataset& data, const std::vector<size_t>& rows) {
  Dataset out;
  out.attributes = data.attributes;
  out.records.reserve(rows.size());
  for (size_t i : rows) {
    if (i >= data.size()) throw DimensionError("select_rows: index out of range");
    out.records.push_back(data.records[i]);
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

}  // namespace heda
