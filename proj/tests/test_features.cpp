#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "heda/errors.hpp"
#include "heda/features.hpp"

namespace {

heda::Dataset labeled_dataset(const std::vector<std::vector<double>>& columns,
                              const std::vector<int>& labels) {
  heda::Dataset data;
  data.attributes.resize(columns.size());
  for (size_t j = 0; j < columns.size(); ++j)
    data.attributes[j].name = "a" + std::to_string(j);
  for (size_t i = 0; i < labels.size(); ++i) {
    std::vector<double> row;
    for (const auto& col : columns) row.push_back(col[i]);
    data.records.push_back(std::move(row));
  }
  data.labels = labels;
  data.refresh_ranges();
  return data;
}

heda::Dataset random_labeled(size_t m, size_t d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::vector<std::vector<double>> columns(d, std::vector<double>(m));
  std::vector<int> labels(m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < d; ++j) columns[j][i] = value(rng);
    labels[i] = static_cast<int>(rng() & 1);
  }
  labels[0] = 0;
  labels[1] = 1;
  return labeled_dataset(columns, labels);
}

heda::Dataset shuffle_records(const heda::Dataset& data, uint64_t seed) {
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return heda::select_rows(data, order);
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("rank statistic separates classes and ignores identical columns") {
  heda::Dataset data = labeled_dataset(
      {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {4, 4, 4, 4, 4, 4, 4, 4, 4, 4}},
      {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  heda::FeatureScores scores = heda::kw_score(data);

  // Perfect separation of 5 + 5 ranks: 12/(10*11) * (5*2.5^2 + 5*2.5^2)
  // evaluated through the rank-sum form gives 75/11.
  CHECK(scores.scores[0] == doctest::Approx(75.0 / 11.0));
  CHECK(scores.scores[0] == doctest::Approx(6.818).epsilon(1e-3));
  CHECK(scores.scores[1] == doctest::Approx(0.0));
  CHECK(scores.ranking == std::vector<size_t>{0, 1});
  CHECK(scores.method == "kw");
}

TEST_CASE("rank statistic applies the tie correction") {
  heda::Dataset data = labeled_dataset({{1, 1, 2, 2}}, {0, 0, 1, 1});
  // Ranks 1.5, 1.5, 3.5, 3.5: uncorrected H is 2.4, the two tie pairs
  // give correction 1 - 12/60, so the statistic is 2.4 / 0.8.
  CHECK(heda::kw_score(data).scores[0] == doctest::Approx(3.0));
}

TEST_CASE("scorers require both classes") {
  heda::Dataset data = labeled_dataset({{1, 2, 3}}, {1, 1, 1});
  CHECK_THROWS_AS(heda::kw_score(data), heda::ParamError);
  CHECK_THROWS_AS(heda::chi2_score(data), heda::ParamError);
}

TEST_CASE("chi square rewards a column equal to the label") {
  heda::Dataset data = labeled_dataset(
      {{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, {3, 3, 3, 3, 3, 3, 3, 3, 3, 3}},
      {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  data.attributes[0].kind = heda::AttributeKind::kDiscrete;
  heda::FeatureScores scores = heda::chi2_score(data);
  // A 2x2 table with perfect association has statistic n.
  CHECK(scores.scores[0] == doctest::Approx(10.0));
  CHECK(scores.scores[1] == doctest::Approx(0.0));
}

TEST_CASE("chi square bins numeric columns against an independent count") {
  heda::Dataset data = random_labeled(200, 1, 31);
  std::vector<double> col = data.column(0);
  double lo = *std::min_element(col.begin(), col.end());
  double hi = *std::max_element(col.begin(), col.end());

  size_t observed[10][2] = {};
  size_t class_total[2] = {};
  for (size_t i = 0; i < col.size(); ++i) {
    long bin = static_cast<long>((col[i] - lo) / (hi - lo) * 10.0);
    bin = std::clamp(bin, 0l, 9l);
    ++observed[bin][data.labels[i]];
    ++class_total[data.labels[i]];
  }
  double expected_chi2 = 0.0;
  for (int b = 0; b < 10; ++b)
    for (int g = 0; g < 2; ++g) {
      double row_total = static_cast<double>(observed[b][0] + observed[b][1]);
      double expected = row_total * class_total[g] / 200.0;
      if (expected <= 0.0) continue;
      double diff = observed[b][g] - expected;
      expected_chi2 += diff * diff / expected;
    }
  CHECK(heda::chi2_score(data).scores[0] == doctest::Approx(expected_chi2));
}

TEST_CASE("linear correlation scores are absolute and guard zero variance") {
  heda::Dataset data = labeled_dataset(
      {{0, 0, 1, 1}, {1, 1, 0, 0}, {5, 5, 5, 5}}, {0, 0, 1, 1});
  heda::FeatureScores scores = heda::pearson_score(data);
  CHECK(scores.scores[0] == doctest::Approx(1.0));
  CHECK(scores.scores[1] == doctest::Approx(1.0));
  CHECK(scores.scores[2] == doctest::Approx(0.0));
}

TEST_CASE("linear correlation matches a direct computation") {
  heda::Dataset data = random_labeled(150, 1, 32);
  std::vector<double> x = data.column(0);
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double my = std::accumulate(data.labels.begin(), data.labels.end(), 0.0) /
              x.size();
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (data.labels[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (data.labels[i] - my) * (data.labels[i] - my);
  }
  double expected = std::fabs(sxy / std::sqrt(sxx * syy));
  CHECK(heda::pearson_score(data).scores[0] ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("rank correlation survives any increasing rescaling") {
  heda::Dataset data = random_labeled(80, 2, 33);
  heda::FeatureScores before_kw = heda::kw_score(data);
  heda::FeatureScores before_sp = heda::spearman_score(data);

  heda::Dataset warped = data;
  for (auto& row : warped.records) {
    row[0] = std::exp(row[0]);
    row[1] = row[1] * row[1] * row[1] + 2.0 * row[1];
  }
  warped.refresh_ranges();
  heda::FeatureScores after_kw = heda::kw_score(warped);
  heda::FeatureScores after_sp = heda::spearman_score(warped);
  for (size_t j = 0; j < 2; ++j) {
    CHECK(after_kw.scores[j] == doctest::Approx(before_kw.scores[j]));
    CHECK(after_sp.scores[j] == doctest::Approx(before_sp.scores[j]));
  }
}

TEST_CASE("all scorers ignore record order") {
  heda::Dataset data = random_labeled(60, 3, 34);
  heda::Dataset shuffled = shuffle_records(data, 77);
  for (const std::string& method : {"kw", "chi2", "pearson", "spearman"}) {
    heda::FeatureScores a = heda::score_features(data, method);
    heda::FeatureScores b = heda::score_features(shuffled, method);
    for (size_t j = 0; j < 3; ++j)
      CHECK(a.scores[j] == doctest::Approx(b.scores[j]));
  }
  CHECK_THROWS_AS(heda::score_features(data, "mrmr"), heda::ParamError);
}

TEST_CASE("negotiation blends providers symmetrically") {
  heda::FeatureScores a;
  a.method = "kw";
  a.scores = {10.0, 2.0, 6.0};
  a.ranking = heda::ranking_for(a.scores);
  heda::FeatureScores b;
  b.method = "kw";
  b.scores = {0.1, 0.9, 0.5};
  b.ranking = heda::ranking_for(b.scores);

  heda::FeatureScores ab = heda::negotiate_scores({a, b});
  heda::FeatureScores ba = heda::negotiate_scores({b, a});
  for (size_t j = 0; j < 3; ++j)
    CHECK(ab.scores[j] == doctest::Approx(ba.scores[j]));

  // Normalized provider a is (1, 0, 0.5) and provider b is (0, 1, 0.5).
  CHECK(ab.scores[0] == doctest::Approx(0.5));
  CHECK(ab.scores[1] == doctest::Approx(0.5));
  CHECK(ab.scores[2] == doctest::Approx(0.5));
  // A three-way tie falls back to attribute order.
  CHECK(ab.ranking == std::vector<size_t>{0, 1, 2});
}

TEST_CASE("negotiating a single provider normalizes without reordering") {
  heda::FeatureScores a;
  a.method = "chi2";
  a.scores = {4.0, 8.0, 6.0};
  a.ranking = heda::ranking_for(a.scores);
  heda::FeatureScores merged = heda::negotiate_scores({a});
  CHECK(merged.scores == std::vector<double>{0.0, 1.0, 0.5});
  CHECK(merged.ranking == a.ranking);

  heda::FeatureScores flat;
  flat.method = "chi2";
  flat.scores = {3.0, 3.0};
  flat.ranking = heda::ranking_for(flat.scores);
  heda::FeatureScores merged_flat = heda::negotiate_scores({flat});
  CHECK(merged_flat.scores == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(heda::negotiate_scores({}), heda::ParamError);
  CHECK_THROWS_AS(heda::negotiate_scores({a, flat}), heda::DimensionError);
}

TEST_CASE("identical providers keep their shared ranking") {
  heda::Dataset data = random_labeled(50, 4, 35);
  heda::FeatureScores own = heda::kw_score(data);
  heda::FeatureScores merged = heda::negotiate_scores({own, own});
  CHECK(merged.ranking == own.ranking);
}

TEST_CASE("equal scores rank by ascending attribute index") {
  CHECK(heda::ranking_for({1.0, 2.0, 2.0}) == std::vector<size_t>{1, 2, 0});
  CHECK(heda::ranking_for({5.0, 5.0, 5.0}) == std::vector<size_t>{0, 1, 2});
}

TEST_CASE("ordering and splitting partitions the columns at iota") {
  heda::Dataset data = labeled_dataset(
      {{1, 2, 3, 4}, {9, 7, 5, 3}, {0, 1, 0, 1}, {2, 2, 3, 3}},
      {0, 1, 0, 1});
  heda::FeatureScores scores;
  scores.method = "kw";
  scores.scores = {0.3, 0.9, 0.1, 0.5};
  scores.ranking = heda::ranking_for(scores.scores);

  heda::SplitDataset split = heda::order_and_split(data, scores, 2);
  CHECK(split.plan.iota == 2);
  CHECK(split.plan.high == std::vector<size_t>{1, 3});
  CHECK(split.plan.low == std::vector<size_t>{0, 2});
  CHECK(split.high.dim() == 2);
  CHECK(split.low.dim() == 2);
  CHECK(split.high.attributes[0].name == "a1");
  CHECK(split.high.records[0][0] == 9.0);
  CHECK(split.low.records[0][0] == 1.0);
  CHECK(split.high.labels == data.labels);
  CHECK(split.low.labels == data.labels);

  std::vector<size_t> all = split.plan.high;
  all.insert(all.end(), split.plan.low.begin(), split.plan.low.end());
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<size_t>{0, 1, 2, 3});

  CHECK_THROWS_AS(heda::order_and_split(data, scores, 0), heda::RangeError);
  CHECK_THROWS_AS(heda::order_and_split(data, scores, 5), heda::RangeError);
}

TEST_SUITE_END();
