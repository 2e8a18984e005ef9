#pragma once

#include "nids/preprocess.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace nids {

inline constexpr double kDefaultZeroRatioThreshold = 0.80;

// Fitted feature-space definition: which numeric columns survive the
// zero-ratio cut, their train min/max, and the categorical vocabularies.
// input_dim = |kept_numeric| + one-hot width (18 + 84 = 102 on NSL-KDD).
struct FeatureSchema {
    std::vector<int> kept_numeric;
    double zero_ratio_threshold = kDefaultZeroRatioThreshold;
    std::vector<std::pair<double, double>> scaling; // (min, max) per kept feature
    CategoricalVocabulary vocab;
    int input_dim = 0;
};

/// Fraction of records with an exact zero, per numeric feature.
std::vector<double> compute_zero_ratios(const LabeledDataset& ds);

/// Indices with ratio <= threshold, in original order. Throws DataError when
/// every feature would be discarded.
std::vector<int> select_features(const std::vector<double>& ratios, double threshold);

std::vector<std::pair<double, double>> fit_scaling(const LabeledDataset& ds,
                                                   const std::vector<int>& kept);

FeatureSchema fit_schema(const LabeledDataset& ds,
                         const CategoricalVocabulary& vocab,
                         double threshold = kDefaultZeroRatioThreshold);

/// [scaled kept numerics || one-hot block]. Numeric entries are min-max
/// scaled and clamped to [0,1]; a constant train feature scales to 0.
std::vector<double> encode(const FeatureSchema& schema, const RawRecord& rec);

/// Row-per-record encoding of a whole dataset.
Eigen::MatrixXd encode_dataset(const FeatureSchema& schema, const LabeledDataset& ds);

} // namespace nids
