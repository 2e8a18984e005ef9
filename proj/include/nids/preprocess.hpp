#pragma once

#include "nids/dataset.hpp"

#include <array>
#include <string>
#include <vector>

namespace nids {

inline constexpr double kMadScale = 1.4826;
inline constexpr double kDefaultOutlierK = 10.0;

// Robust per-feature location and dispersion fitted on the training split.
// mad = c * median(|x - median(x)|); features with mad == 0 never trigger
// the outlier test.
struct OutlierModel {
    std::array<double, kNumericFeatureCount> median{};
    std::array<double, kNumericFeatureCount> mad{};
    double c = kMadScale;
    double k = kDefaultOutlierK;
};

OutlierModel fit_outlier_model(const LabeledDataset& ds,
                               double c = kMadScale,
                               double k = kDefaultOutlierK);

/// True iff some feature i with mad_i > 0 deviates from its median by more
/// than k * mad_i.
bool is_outlier(const OutlierModel& model, const RawRecord& rec);

LabeledDataset filter_outliers(const OutlierModel& model, const LabeledDataset& ds);

// Distinct symbols per categorical feature, in first-occurrence order over
// the training split.
struct CategoricalVocabulary {
    std::vector<std::string> protocol;
    std::vector<std::string> service;
    std::vector<std::string> flag;

    std::size_t one_hot_width() const {
        return protocol.size() + service.size() + flag.size();
    }
};

CategoricalVocabulary fit_vocabulary(const LabeledDataset& ds);

/// Indicator blocks for protocol, service and flag concatenated in column
/// order. A symbol absent from the vocabulary encodes as an all-zero block.
std::vector<double> one_hot(const CategoricalVocabulary& vocab, const RawRecord& rec);

} // namespace nids
