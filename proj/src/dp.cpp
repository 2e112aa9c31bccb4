#include "heda/dp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "heda/errors.hpp"

namespace heda {

AttributeStats compute_attribute_stats(const std::vector<double>& column) {
  if (column.empty()) throw ParamError("attribute stats: empty column");
  AttributeStats stats;
  stats.m = column.size();
  stats.delta_f = *std::max_element(column.begin(), column.end());
  stats.delta_v = stats.delta_f - *std::min_element(column.begin(), column.end());
  std::map<double, size_t> counts;
  for (double v : column) ++counts[v];
  for (const auto& [value, count] : counts)
    stats.count_max = std::max(stats.count_max, count);
  return stats;
}

double rho_upper_bound(const std::vector<double>& column) {
  AttributeStats stats = compute_attribute_stats(column);
  return static_cast<double>(stats.count_max) / static_cast<double>(stats.m);
}

double epsilon_for_attribute(const AttributeStats& stats, bool* degenerate) {
  if (stats.m < 2) throw ParamError("epsilon: need at least 2 records");
  if (stats.count_max < 1 || stats.count_max > stats.m)
    throw ParamError("epsilon: modal count out of range");
  if (degenerate) *degenerate = false;
  double rho = static_cast<double>(stats.count_max) /
               static_cast<double>(stats.m);
  if (rho >= 1.0 || stats.delta_v <= 0.0) {
    if (degenerate) *degenerate = true;
    return kEpsilonMax;
  }
  double raw = (stats.delta_f / stats.delta_v) *
               std::log((static_cast<double>(stats.m) - 1.0) * rho /
                        (1.0 - rho));
  return std::clamp(raw, kEpsilonMin, kEpsilonMax);
}

double EpsilonBudget::dataset_epsilon() const {
  if (per_attribute.empty()) throw ParamError("budget: no attributes");
  return *std::max_element(per_attribute.begin(), per_attribute.end());
}

EpsilonBudget select_epsilon(const Dataset& data) {
  EpsilonBudget budget;
  for (size_t j = 0; j < data.dim(); ++j) {
    bool flag = false;
    budget.per_attribute.push_back(
        epsilon_for_attribute(compute_attribute_stats(data.column(j)), &flag));
    budget.degenerate.push_back(flag);
  }
  return budget;
}

double range_normalized_distance(const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& upper,
                                 const std::vector<double>& lower) {
  if (x.size() != y.size() || x.size() != upper.size() ||
      x.size() != lower.size())
    throw DimensionError("distance: dimension mismatch");
  double sum = 0.0;
  for (size_t j = 0; j < x.size(); ++j) {
    double span = upper[j] - lower[j];
    if (span <= 0.0) continue;
    double t = (x[j] - y[j]) / span;
    sum += t * t;
  }
  return std::sqrt(sum);
}

namespace {

// Indices of the k remaining records nearest to the target point, stable
// on index so equal distances resolve the same way every run.
std::vector<size_t> k_nearest(const Dataset& data,
                              const std::vector<size_t>& remaining,
                              const std::vector<double>& target,
                              const std::vector<double>& upper,
                              const std::vector<double>& lower, size_t k) {
  std::vector<std::pair<double, size_t>> by_distance;
  by_distance.reserve(remaining.size());
  for (size_t i : remaining)
    by_distance.emplace_back(
        range_normalized_distance(data.records[i], target, upper, lower), i);
  std::sort(by_distance.begin(), by_distance.end());
  std::vector<size_t> picked;
  picked.reserve(k);
  for (size_t t = 0; t < k; ++t) picked.push_back(by_distance[t].second);
  return picked;
}

std::vector<double> cluster_centroid(const Dataset& data,
                                     const std::vector<size_t>& members) {
  std::vector<double> centroid(data.dim(), 0.0);
  for (size_t i : members)
    for (size_t j = 0; j < data.dim(); ++j) centroid[j] += data.records[i][j];
  for (double& c : centroid) c /= static_cast<double>(members.size());
  return centroid;
}

}  // namespace

ClusteredDataset ima_cluster(const Dataset& data, size_t k) {
  if (k < 1) throw ParamError("ima: cluster size must be at least 1");
  if (data.size() < 2 * k)
    throw ParamError("ima: need at least 2k records, have " +
                     std::to_string(data.size()));

  ClusteredDataset out;
  out.k = k;
  out.upper.assign(data.dim(), 0.0);
  out.lower.assign(data.dim(), 0.0);
  for (size_t j = 0; j < data.dim(); ++j) {
    std::vector<double> col = data.column(j);
    out.upper[j] = *std::max_element(col.begin(), col.end());
    out.lower[j] = *std::min_element(col.begin(), col.end());
  }

  std::vector<size_t> remaining(data.size());
  std::iota(remaining.begin(), remaining.end(), size_t{0});
  auto remove_members = [&remaining](const std::vector<size_t>& members) {
    for (size_t i : members)
      remaining.erase(std::find(remaining.begin(), remaining.end(), i));
  };

  while (remaining.size() >= 2 * k) {
    std::vector<size_t> near_upper =
        k_nearest(data, remaining, out.upper, out.upper, out.lower, k);
    remove_members(near_upper);
    out.clusters.push_back(std::move(near_upper));
    std::vector<size_t> near_lower =
        k_nearest(data, remaining, out.lower, out.upper, out.lower, k);
    remove_members(near_lower);
    out.clusters.push_back(std::move(near_lower));
  }
  if (!remaining.empty()) out.clusters.push_back(remaining);

  out.assignment.assign(data.size(), 0);
  for (size_t c = 0; c < out.clusters.size(); ++c) {
    out.centroids.push_back(cluster_centroid(data, out.clusters[c]));
    for (size_t i : out.clusters[c]) out.assignment[i] = c;
  }
  return out;
}

Dataset materialize_ima(const Dataset& data,
                        const ClusteredDataset& clustered) {
  if (clustered.assignment.size() != data.size())
    throw DimensionError("ima: clustering does not match dataset");
  Dataset out = data;
  for (size_t i = 0; i < out.size(); ++i)
    out.records[i] = clustered.centroids[clustered.assignment[i]];
  out.refresh_ranges();
  return out;
}

size_t best_cluster_size(size_t m) {
  size_t k = static_cast<size_t>(
      std::floor(std::sqrt(static_cast<double>(m) / 2.0)));
  return std::max<size_t>(k, 1);
}

double ima_sensitivity(double delta_f, size_t k, size_t m) {
  if (k < 1 || m < 1) throw ParamError("ima sensitivity: k and m must be positive");
  double affected = std::ceil(static_cast<double>(m) /
                              (2.0 * static_cast<double>(k)));
  return delta_f / static_cast<double>(k) * affected;
}

double laplace_sample(std::mt19937_64& rng, double scale) {
  if (scale < 0.0) throw ParamError("laplace: negative scale");
  if (scale == 0.0) return 0.0;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double u = 0.0;
  do {
    u = uniform(rng);
  } while (u <= 0.0);
  double q = u - 0.5;
  double sign = q < 0.0 ? -1.0 : 1.0;
  return -scale * sign * std::log(1.0 - 2.0 * std::fabs(q));
}

namespace {

NoisedDataset add_noise(const Dataset& base, const Dataset& original,
                        const EpsilonBudget& budget, uint64_t seed, size_t k,
                        bool reduce_sensitivity) {
  if (budget.per_attribute.size() != original.dim())
    throw DimensionError("dp publish: budget does not match dataset width");
  NoisedDataset out;
  out.data = base;
  out.k = k;
  out.seed = seed;
  out.epsilon = budget.per_attribute;
  for (size_t j = 0; j < original.dim(); ++j) {
    AttributeStats stats = compute_attribute_stats(original.column(j));
    if (stats.delta_f < 0.0)
      throw ParamError("dp publish: attribute " + std::to_string(j) +
                       " has negative maximum; shift to nonnegative first");
    double delta_prime = reduce_sensitivity
                             ? ima_sensitivity(stats.delta_f, k, stats.m)
                             : stats.delta_f;
    out.delta_f.push_back(stats.delta_f);
    out.delta_f_prime.push_back(delta_prime);
    double scale = delta_prime / budget.per_attribute[j];
    std::mt19937_64 rng(seed ^ static_cast<uint64_t>(j));
    for (size_t i = 0; i < out.data.size(); ++i)
      out.data.records[i][j] += laplace_sample(rng, scale);
  }
  out.data.refresh_ranges();
  return out;
}

}  // namespace

NoisedDataset publish_ima_dp(const Dataset& data, size_t k,
                             const EpsilonBudget& budget, uint64_t seed) {
  Dataset centroids = materialize_ima(data, ima_cluster(data, k));
  return add_noise(centroids, data, budget, seed, k, true);
}

NoisedDataset publish_standard_dp(const Dataset& data,
                                  const EpsilonBudget& budget, uint64_t seed) {
  return add_noise(data, data, budget, seed, 0, false);
}

double sse(const Dataset& original, const Dataset& published) {
  if (original.size() != published.size() ||
      original.dim() != published.dim())
    throw DimensionError("sse: datasets differ in shape");
  double total = 0.0;
  for (size_t i = 0; i < original.size(); ++i)
    for (size_t j = 0; j < original.dim(); ++j) {
      double diff = original.records[i][j] - published.records[i][j];
      total += diff * diff;
    }
  return total;
}

double record_linkage(const Dataset& original, const Dataset& published) {
  if (original.size() != published.size() ||
      original.dim() != published.dim())
    throw DimensionError("record linkage: datasets differ in shape");
  std::vector<double> upper(original.dim()), lower(original.dim());
  for (size_t j = 0; j < original.dim(); ++j) {
    std::vector<double> col = original.column(j);
    upper[j] = *std::max_element(col.begin(), col.end());
    lower[j] = *std::min_element(col.begin(), col.end());
  }

  double hits = 0.0;
  for (size_t i = 0; i < published.size(); ++i) {
    std::vector<double> dist(original.size());
    double best = 0.0;
    for (size_t s = 0; s < original.size(); ++s) {
      dist[s] = range_normalized_distance(published.records[i],
                                          original.records[s], upper, lower);
      if (s == 0 || dist[s] < best) best = dist[s];
    }
    double tie_bound = best + 1e-12 + best * 1e-9;
    size_t ties = 0;
    bool source_in_ties = false;
    for (size_t s = 0; s < original.size(); ++s) {
      if (dist[s] <= tie_bound) {
        ++ties;
        if (s == i) source_in_ties = true;
      }
    }
    if (source_in_ties) hits += 1.0 / static_cast<double>(ties);
  }
  return hits / static_cast<double>(original.size());
}

}  // namespace heda
