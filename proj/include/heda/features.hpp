#pragma once

#include <string>
#include <vector>

#include "heda/dataset.hpp"

namespace heda {

// Per-attribute relevance scores plus the ranking they induce. The
// ranking lists attribute indices by descending score; equal scores keep
// ascending index order so every run produces the same split.
struct FeatureScores {
  std::string method;
  std::vector<double> scores;
  std::vector<size_t> ranking;
};

std::vector<size_t> ranking_for(const std::vector<double>& scores);

// Kruskal-Wallis H of each attribute grouped by class, tie-corrected.
// Rank-based, so any strictly increasing rescaling of an attribute leaves
// its score unchanged.
FeatureScores kw_score(const Dataset& data);

// Chi-square statistic of attribute versus class. Numeric attributes are
// binned into 10 equal-width bins; discrete attributes use one bin per
// distinct code.
FeatureScores chi2_score(const Dataset& data);

// Absolute Pearson correlation with the label; 0 when either side has no
// variance.
FeatureScores pearson_score(const Dataset& data);

// Absolute Spearman rank correlation with the label, average ranks on
// ties.
FeatureScores spearman_score(const Dataset& data);

FeatureScores score_features(const Dataset& data, const std::string& method);

// Combines the providers' scores into one agreed vector: each provider's
// scores are min-max normalized so no provider's scale dominates, then
// averaged per attribute. Symmetric in provider order.
FeatureScores negotiate_scores(const std::vector<FeatureScores>& providers);

struct SplitPlan {
  size_t iota = 0;
  std::vector<size_t> high;
  std::vector<size_t> low;
};

SplitPlan make_split_plan(const FeatureScores& scores, size_t iota);

struct SplitDataset {
  Dataset high;
  Dataset low;
  SplitPlan plan;
};

// Reorders columns by descending score and cuts after the first iota:
// the high-score view goes to the encrypted path, the low-score view to
// the noised path. Labels travel with both views.
SplitDataset order_and_split(const Dataset& data, const FeatureScores& scores,
                             size_t iota);

}  // namespace heda
