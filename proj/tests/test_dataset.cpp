#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "heda/dataset.hpp"
#include "heda/errors.hpp"

namespace {

std::string write_temp_csv(const std::string& stem, const std::string& body) {
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / (stem + ".csv");
  std::ofstream out(path);
  out << body;
  out.close();
  return path.string();
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("csv loads numeric and discrete columns") {
  std::string path = write_temp_csv("mixed",
                                    "age,color,label\n"
                                    "1.5,red,0\n"
                                    "2.5,blue,1\n"
                                    "3.5,red,1\n");
  heda::CsvSchema schema;
  schema.label_column = "label";
  schema.discrete_columns = {"color"};
  heda::CsvLoadReport report;
  heda::Dataset data = heda::load_csv(path, schema, &report);

  CHECK(data.size() == 3);
  CHECK(data.dim() == 2);
  CHECK(report.rows_read == 3);
  CHECK(report.rows_dropped == 0);
  CHECK(data.attributes[0].name == "age");
  CHECK(data.attributes[0].kind == heda::AttributeKind::kNumeric);
  CHECK(data.attributes[1].kind == heda::AttributeKind::kDiscrete);
  // First appearance fixes the code: red was seen before blue.
  CHECK(data.attributes[1].encoding.at("red") == 0.0);
  CHECK(data.attributes[1].encoding.at("blue") == 1.0);
  CHECK(data.records[1][1] == 1.0);
  CHECK(data.labels == std::vector<int>{0, 1, 1});
  CHECK(data.attributes[0].min == 1.5);
  CHECK(data.attributes[0].max == 3.5);
}

TEST_CASE("csv drops rows with missing cells and counts them") {
  std::string path = write_temp_csv("gaps",
                                    "a,b,label\n"
                                    "1,2,0\n"
                                    "?,3,1\n"
                                    "4,,1\n"
                                    "5,6,1\n");
  heda::CsvSchema schema;
  schema.label_column = "label";
  heda::CsvLoadReport report;
  heda::Dataset data = heda::load_csv(path, schema, &report);
  CHECK(data.size() == 2);
  CHECK(report.rows_read == 4);
  CHECK(report.rows_dropped == 2);
  CHECK(data.records[1][0] == 5.0);
}

TEST_CASE("csv maps two distinct label values onto 0 and 1") {
  std::string path = write_temp_csv("labels24",
                                    "x,class\n"
                                    "1,4\n"
                                    "2,2\n"
                                    "3,4\n");
  heda::CsvSchema schema;
  schema.label_column = "class";
  heda::Dataset data = heda::load_csv(path, schema, nullptr);
  CHECK(data.labels == std::vector<int>{1, 0, 1});
}

TEST_CASE("csv rejects malformed inputs") {
  heda::CsvSchema schema;
  schema.label_column = "label";

  std::string empty = write_temp_csv("empty", "");
  CHECK_THROWS_AS(heda::load_csv(empty, schema), heda::ParseError);

  std::string no_label = write_temp_csv("nolabel", "a,b\n1,2\n");
  CHECK_THROWS_AS(heda::load_csv(no_label, schema), heda::ParseError);

  std::string three_classes = write_temp_csv("triple",
                                             "a,label\n1,0\n2,1\n3,2\n");
  CHECK_THROWS_AS(heda::load_csv(three_classes, schema), heda::ParseError);

  std::string bad_number = write_temp_csv("notnum",
                                          "a,label\nfoo,0\n2,1\n");
  CHECK_THROWS_AS(heda::load_csv(bad_number, schema), heda::ParseError);

  std::string ragged = write_temp_csv("ragged",
                                      "a,b,label\n1,2,0\n3,1\n");
  CHECK_THROWS_AS(heda::load_csv(ragged, schema), heda::ParseError);

  CHECK_THROWS_AS(heda::load_csv("/nonexistent/nowhere.csv", schema),
                  heda::ParseError);
}

namespace {

heda::Dataset toy_dataset(size_t m) {
  heda::Dataset data;
  data.attributes.resize(2);
  data.attributes[0].name = "a";
  data.attributes[1].name = "b";
  for (size_t i = 0; i < m; ++i) {
    double v = static_cast<double>(i);
    data.records.push_back({v, 2.0 * v});
    data.labels.push_back(i % 2 == 0 ? 0 : 1);
  }
  data.refresh_ranges();
  return data;
}

}  // namespace

TEST_CASE("train test split has ceil(fraction m) training records") {
  heda::Dataset data = toy_dataset(10);
  auto [train, test] = heda::split_train_test(data, 0.8, 7);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);

  auto [train2, test2] = heda::split_train_test(toy_dataset(7), 0.8, 7);
  CHECK(train2.size() == 6);
  CHECK(test2.size() == 1);

  CHECK_THROWS_AS(heda::split_train_test(data, 0.0, 1), heda::ParamError);
  CHECK_THROWS_AS(heda::split_train_test(data, 1.0, 1), heda::ParamError);
}

TEST_CASE("train test split is a seeded permutation of the records") {
  heda::Dataset data = toy_dataset(25);
  auto [train_a, test_a] = heda::split_train_test(data, 0.8, 42);
  auto [train_b, test_b] = heda::split_train_test(data, 0.8, 42);
  CHECK(train_a.records == train_b.records);
  CHECK(test_a.labels == test_b.labels);

  std::multiset<double> seen;
  for (const auto& row : train_a.records) seen.insert(row[0]);
  for (const auto& row : test_a.records) seen.insert(row[0]);
  std::multiset<double> expected;
  for (const auto& row : data.records) expected.insert(row[0]);
  CHECK(seen == expected);

  auto [train_c, test_c] = heda::split_train_test(data, 0.8, 43);
  CHECK(train_a.records != train_c.records);
}

TEST_CASE("min max normalization maps every column into the unit interval") {
  heda::Dataset data = toy_dataset(9);
  for (auto& row : data.records) row[1] = 5.0;
  data.refresh_ranges();
  heda::Dataset scaled = heda::min_max_normalize(data);
  CHECK(scaled.records[0][0] == 0.0);
  CHECK(scaled.records[8][0] == 1.0);
  CHECK(scaled.records[4][0] == doctest::Approx(0.5));
  for (const auto& row : scaled.records) CHECK(row[1] == 0.0);
}

TEST_CASE("column selection keeps labels and checks bounds") {
  heda::Dataset data = toy_dataset(4);
  heda::Dataset picked = heda::select_columns(data, {1});
  CHECK(picked.dim() == 1);
  CHECK(picked.attributes[0].name == "b");
  CHECK(picked.records[3][0] == 6.0);
  CHECK(picked.labels == data.labels);
  CHECK_THROWS_AS(heda::select_columns(data, {2}), heda::DimensionError);
  CHECK_THROWS_AS(heda::select_rows(data, {4}), heda::DimensionError);
}

TEST_SUITE_END();
