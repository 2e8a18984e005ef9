#include "nids/features.hpp"

#include "nids/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nids {

std::vector<double> compute_zero_ratios(const LabeledDataset& ds) {
    if (ds.size() == 0) throw DataError("cannot compute zero ratios on an empty dataset");

    std::vector<double> ratios(kNumericFeatureCount, 0.0);
    for (const auto& rec : ds.records)
        for (int f = 0; f < kNumericFeatureCount; ++f)
            if (rec.numeric[static_cast<std::size_t>(f)] == 0.0)
                ratios[static_cast<std::size_t>(f)] += 1.0;
    for (auto& r : ratios) r /= static_cast<double>(ds.size());
    return ratios;
}

std::vector<int> select_features(const std::vector<double>& ratios, double threshold) {
    std::vector<int> kept;
    for (std::size_t i = 0; i < ratios.size(); ++i)
        if (ratios[i] <= threshold) kept.push_back(static_cast<int>(i));
    if (kept.empty())
        throw DataError("zero-ratio threshold " + std::to_string(threshold) +
                        " discards every numeric feature");
    return kept;
}

std::vector<std::pair<double, double>> fit_scaling(const LabeledDataset& ds,
                                                   const std::vector<int>& kept) {
    std::vector<std::pair<double, double>> scaling;
    scaling.reserve(kept.size());
    for (int f : kept) {
        double lo = ds.records.front().numeric[static_cast<std::size_t>(f)];
        double hi = lo;
        for (const auto& rec : ds.records) {
            const double v = rec.numeric[static_cast<std::size_t>(f)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        scaling.emplace_back(lo, hi);
    }
    return scaling;
}

FeatureSchema fit_schema(const LabeledDataset& ds, const CategoricalVocabulary& vocab,
                         double threshold) {
    FeatureSchema schema;
    schema.zero_ratio_threshold = threshold;
    schema.kept_numeric = select_features(compute_zero_ratios(ds), threshold);
    schema.scaling = fit_scaling(ds, schema.kept_numeric);
    schema.vocab = vocab;
    schema.input_dim = static_cast<int>(schema.kept_numeric.size() + vocab.one_hot_width());
    return schema;
}

std::vector<double> encode(const FeatureSchema& schema, const RawRecord& rec) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(schema.input_dim));
    for (std::size_t i = 0; i < schema.kept_numeric.size(); ++i) {
        const auto [lo, hi] = schema.scaling[i];
        const double x = rec.numeric[static_cast<std::size_t>(schema.kept_numeric[i])];
        double scaled = 0.0;
        if (hi > lo) scaled = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
        out.push_back(scaled);
    }
    const auto hot = one_hot(schema.vocab, rec);
    out.insert(out.end(), hot.begin(), hot.end());
    return out;
}

Eigen::MatrixXd encode_dataset(const FeatureSchema& schema, const LabeledDataset& ds) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ds.size()), schema.input_dim);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto row = encode(schema, ds.records[i]);
        for (int j = 0; j < schema.input_dim; ++j)
            out(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
    return out;
}

} // namespace nids
