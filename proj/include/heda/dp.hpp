#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "heda/dataset.hpp"

namespace heda {

// Privacy budgets are clamped to this interval: the selection formula
// yields 0 for all-distinct columns and diverges for near-constant ones.
inline constexpr double kEpsilonMin = 0.01;
inline constexpr double kEpsilonMax = 10.0;

// Per-attribute quantities the budget formula consumes. delta_f is the
// column maximum, delta_v the value spread, count_max the modal count.
struct AttributeStats {
  double delta_f = 0.0;
  double delta_v = 0.0;
  size_t count_max = 0;
  size_t m = 0;
};

AttributeStats compute_attribute_stats(const std::vector<double>& column);

// Fraction of the column held by its most frequent value, the adversary's
// best single-guess success probability.
double rho_upper_bound(const std::vector<double>& column);

// Budget for one attribute:
//   clamp((delta_f/delta_v) * ln((m-1) * rho / (1 - rho)), eps_min, eps_max)
// Degenerate columns (all equal, or zero spread) get eps_max and set the
// flag: no meaningful budget can be derived for them.
double epsilon_for_attribute(const AttributeStats& stats,
                             bool* degenerate = nullptr);

struct EpsilonBudget {
  std::vector<double> per_attribute;
  std::vector<bool> degenerate;

  // The dataset-level budget: clusters partition the records, so parallel
  // composition charges only the largest per-attribute value.
  double dataset_epsilon() const;
};

EpsilonBudget select_epsilon(const Dataset& data);

// Distance with every coordinate scaled by that attribute's spread.
// Zero-spread attributes contribute nothing.
double range_normalized_distance(const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& upper,
                                 const std::vector<double>& lower);

struct ClusteredDataset {
  std::vector<std::vector<size_t>> clusters;
  std::vector<std::vector<double>> centroids;
  std::vector<size_t> assignment;
  size_t k = 0;
  // Boundary points: componentwise max (P) and min (P') of the input,
  // fixed before clustering starts so the record order they induce does
  // not shift as clusters are removed.
  std::vector<double> upper;
  std::vector<double> lower;
};

// Fixed-order microaggregation: while at least 2k records remain, the k
// records nearest the upper boundary point form one cluster and the k
// nearest the lower boundary point form another; whatever is left after
// the loop forms the final cluster. Ties break on record index.
ClusteredDataset ima_cluster(const Dataset& data, size_t k);

// Every record replaced by its cluster centroid.
Dataset materialize_ima(const Dataset& data, const ClusteredDataset& clustered);

// floor(sqrt(m/2)), at least 1: the cluster size balancing per-centroid
// damping (1/k) against the number of affected clusters (m/2k).
size_t best_cluster_size(size_t m);

// Sensitivity of a centroid-published attribute: one changed record moves
// at most ceil(m/2k) centroids by at most delta_f/k each.
double ima_sensitivity(double delta_f, size_t k, size_t m);

// One Laplace draw with the given scale, via inverse CDF.
double laplace_sample(std::mt19937_64& rng, double scale);

struct NoisedDataset {
  Dataset data;
  std::vector<double> epsilon;
  std::vector<double> delta_f;
  std::vector<double> delta_f_prime;
  size_t k = 0;
  uint64_t seed = 0;
};

// Centroid replacement followed by per-attribute Laplace noise at scale
// delta_f'/epsilon. Labels pass through unperturbed. Attribute j draws
// from its own generator seeded with (seed XOR j) so noising is
// deterministic and order-independent across attributes.
NoisedDataset publish_ima_dp(const Dataset& data, size_t k,
                             const EpsilonBudget& budget, uint64_t seed);

// Baseline without microaggregation: Laplace at scale delta_f/epsilon on
// the raw records, same seeding rule. k is recorded as 0.
NoisedDataset publish_standard_dp(const Dataset& data,
                                  const EpsilonBudget& budget, uint64_t seed);

// Total squared attribute distortion between two same-shape datasets.
double sse(const Dataset& original, const Dataset& published);

// Fraction of published records an adversary links back to their source
// by nearest range-normalized distance. Each published record contributes
// 1/|R| when its true source lies in the tie set R of nearest originals.
double record_linkage(const Dataset& original, const Dataset& published);

}  // namespace heda
