#include "heda/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "heda/errors.hpp"

namespace heda {

namespace {

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values) {
  size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&values](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

void require_two_classes(const Dataset& data) {
  if (data.size() == 0) throw ParamError("scoring: empty dataset");
  if (data.labels.size() != data.size())
    throw DimensionError("scoring: labels do not match records");
  bool has0 = false;
  bool has1 = false;
  for (int y : data.labels) {
    if (y == 0) has0 = true;
    if (y == 1) has1 = true;
  }
  if (!has0 || !has1)
    throw ParamError("scoring: need records from both classes");
}

double kw_statistic(const std::vector<double>& column,
                    const std::vector<int>& labels) {
  size_t n = column.size();
  std::vector<double> ranks = average_ranks(column);
  double rank_sum[2] = {0.0, 0.0};
  size_t class_size[2] = {0, 0};
  for (size_t i = 0; i < n; ++i) {
    rank_sum[labels[i]] += ranks[i];
    ++class_size[labels[i]];
  }
  double nd = static_cast<double>(n);
  double h = 0.0;
  for (int g = 0; g < 2; ++g)
    h += rank_sum[g] * rank_sum[g] / static_cast<double>(class_size[g]);
  h = 12.0 / (nd * (nd + 1.0)) * h - 3.0 * (nd + 1.0);

  std::map<double, size_t> tie_groups;
  for (double v : column) ++tie_groups[v];
  double tie_term = 0.0;
  for (const auto& [value, t] : tie_groups) {
    double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  double correction = 1.0 - tie_term / (nd * nd * nd - nd);
  if (correction <= 0.0) return 0.0;
  return h / correction;
}

double chi2_statistic(const std::vector<double>& column,
                      const std::vector<int>& labels, AttributeKind kind) {
  size_t n = column.size();
  std::map<long, std::array<size_t, 2>> table;
  if (kind == AttributeKind::kDiscrete) {
    for (size_t i = 0; i < n; ++i)
      ++table[std::lround(column[i])][labels[i]];
  } else {
    double lo = *std::min_element(column.begin(), column.end());
    double hi = *std::max_element(column.begin(), column.end());
    double span = hi - lo;
    for (size_t i = 0; i < n; ++i) {
      long bin = 0;
      if (span > 0.0) {
        bin = static_cast<long>((column[i] - lo) / span * 10.0);
        bin = std::clamp(bin, 0l, 9l);
      }
      ++table[bin][labels[i]];
    }
  }

  size_t class_total[2] = {0, 0};
  for (int y : labels) ++class_total[y];
  double chi2 = 0.0;
  for (const auto& [bin, row] : table) {
    double row_total = static_cast<double>(row[0] + row[1]);
    for (int g = 0; g < 2; ++g) {
      double expected = row_total * static_cast<double>(class_total[g]) /
                        static_cast<double>(n);
      if (expected <= 0.0) continue;
      double diff = static_cast<double>(row[g]) - expected;
      chi2 += diff * diff / expected;
    }
  }
  return chi2;
}

double pearson_abs(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::fabs(sxy / std::sqrt(sxx * syy));
}

FeatureScores score_with(const Dataset& data, const std::string& method,
                         double (*column_score)(const std::vector<double>&,
                                                const Dataset&, size_t)) {
  require_two_classes(data);
  FeatureScores out;
  out.method = method;
  for (size_t j = 0; j < data.dim(); ++j)
    out.scores.push_back(column_score(data.column(j), data, j));
  out.ranking = ranking_for(out.scores);
  return out;
}

}  // namespace

std::vector<size_t> ranking_for(const std::vector<double>& scores) {
  std::vector<size_t> ranking(scores.size());
  std::iota(ranking.begin(), ranking.end(), size_t{0});
  std::stable_sort(ranking.begin(), ranking.end(),
                   [&scores](size_t a, size_t b) {
                     return scores[a] > scores[b];
                   });
  return ranking;
}

FeatureScores kw_score(const Dataset& data) {
  return score_with(data, "kw",
                    [](const std::vector<double>& col, const Dataset& d,
                       size_t) { return kw_statistic(col, d.labels); });
}

FeatureScores chi2_score(const Dataset& data) {
  return score_with(data, "chi2",
                    [](const std::vector<double>& col, const Dataset& d,
                       size_t j) {
                      return chi2_statistic(col, d.labels,
                                            d.attributes[j].kind);
                    });
}

FeatureScores pearson_score(const Dataset& data) {
  return score_with(data, "pearson",
                    [](const std::vector<double>& col, const Dataset& d,
                       size_t) {
                      std::vector<double> y(d.labels.begin(), d.labels.end());
                      return pearson_abs(col, y);
                    });
}

FeatureScores spearman_score(const Dataset& data) {
  return score_with(data, "spearman",
                    [](const std::vector<double>& col, const Dataset& d,
                       size_t) {
                      std::vector<double> y(d.labels.begin(), d.labels.end());
                      return pearson_abs(average_ranks(col), average_ranks(y));
                    });
}

FeatureScores score_features(const Dataset& data, const std::string& method) {
  if (method == "kw") return kw_score(data);
  if (method == "chi2") return chi2_score(data);
  if (method == "pearson") return pearson_score(data);
  if (method == "spearman") return spearman_score(data);
  throw ParamError("scoring: unknown method '" + method + "'");
}

FeatureScores negotiate_scores(const std::vector<FeatureScores>& providers) {
  if (providers.empty()) throw ParamError("negotiate: no providers");
  size_t d = providers.front().scores.size();
  for (const FeatureScores& p : providers)
    if (p.scores.size() != d)
      throw DimensionError("negotiate: providers disagree on width");

  FeatureScores out;
  out.method = providers.front().method;
  out.scores.assign(d, 0.0);
  for (const FeatureScores& p : providers) {
    double lo = *std::min_element(p.scores.begin(), p.scores.end());
    double hi = *std::max_element(p.scores.begin(), p.scores.end());
    double span = hi - lo;
    for (size_t j = 0; j < d; ++j) {
      double normalized = span > 0.0 ? (p.scores[j] - lo) / span : 0.0;
      out.scores[j] += normalized / static_cast<double>(providers.size());
    }
  }
  out.ranking = ranking_for(out.scores);
  return out;
}

SplitPlan make_split_plan(const FeatureScores& scores, size_t iota) {
  size_t d = scores.ranking.size();
  if (iota < 1 || iota > d)
    throw RangeError("split: iota must lie in [1, " + std::to_string(d) + "]");
  SplitPlan plan;
  plan.iota = iota;
  plan.high.assign(scores.ranking.begin(), scores.ranking.begin() + iota);
  plan.low.assign(scores.ranking.begin() + iota, scores.ranking.end());
  return plan;
}

SplitDataset order_and_split(const Dataset& data, const FeatureScores& scores,
                             size_t iota) {
  if (scores.ranking.size() != data.dim())
    throw DimensionError("split: scores do not match dataset width");
  SplitDataset out;
  out.plan = make_split_plan(scores, iota);
  out.high = select_columns(data, out.plan.high);
  out.low = select_columns(data, out.plan.low);
  return out;
}

}  // namespace heda
