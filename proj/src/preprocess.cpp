#include "nids/preprocess.hpp"

#include "nids/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace nids {

namespace {

// Midpoint convention for even-length inputs; mutates its argument.
double median_inplace(std::vector<double>& values) {
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    double upper = values[mid];
    if (n % 2 == 1) return upper;
    double lower = *std::max_element(values.begin(),
                                     values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace

OutlierModel fit_outlier_model(const LabeledDataset& ds, double c, double k) {
    if (ds.size() == 0) throw DataError("cannot fit outlier model on an empty dataset");
    if (ds.split != Split::Train)
        throw DataError("outlier statistics are fitted on the training split only");

    OutlierModel model;
    model.c = c;
    model.k = k;
    std::vector<double> column(ds.size());
    for (int f = 0; f < kNumericFeatureCount; ++f) {
        for (std::size_t i = 0; i < ds.size(); ++i)
            column[i] = ds.records[i].numeric[static_cast<std::size_t>(f)];
        const double med = median_inplace(column);
        for (std::size_t i = 0; i < ds.size(); ++i)
            column[i] = std::abs(ds.records[i].numeric[static_cast<std::size_t>(f)] - med);
        model.median[static_cast<std::size_t>(f)] = med;
        model.mad[static_cast<std::size_t>(f)] = c * median_inplace(column);
    }
    return model;
}

bool is_outlier(const OutlierModel& model, const RawRecord& rec) {
    for (int f = 0; f < kNumericFeatureCount; ++f) {
        const double mad = model.mad[static_cast<std::size_t>(f)];
        if (mad <= 0.0) continue;
        const double dev = std::abs(rec.numeric[static_cast<std::size_t>(f)] -
                                    model.median[static_cast<std::size_t>(f)]);
        if (dev > model.k * mad) return true;
    }
    return false;
}

LabeledDataset filter_outliers(const OutlierModel& model, const LabeledDataset& ds) {
    LabeledDataset out;
    out.split = ds.split;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (is_outlier(model, ds.records[i])) continue;
        out.records.push_back(ds.records[i]);
        out.categories.push_back(ds.categories[i]);
    }
    return out;
}

CategoricalVocabulary fit_vocabulary(const LabeledDataset& ds) {
    if (ds.size() == 0) throw DataError("cannot fit vocabulary on an empty dataset");
    if (ds.split != Split::Train)
        throw DataError("vocabularies are fitted on the training split only");

    CategoricalVocabulary vocab;
    std::unordered_set<std::string> seen_protocol, seen_service, seen_flag;
    for (const auto& rec : ds.records) {
        if (seen_protocol.insert(rec.protocol).second) vocab.protocol.push_back(rec.protocol);
        if (seen_service.insert(rec.service).second) vocab.service.push_back(rec.service);
        if (seen_flag.insert(rec.flag).second) vocab.flag.push_back(rec.flag);
    }
    return vocab;
}

namespace {

void append_block(std::vector<double>& out, const std::vector<std::string>& vocab,
                  const std::string& symbol) {
    const std::size_t base = out.size();
    out.resize(base + vocab.size(), 0.0);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (vocab[i] == symbol) {
            out[base + i] = 1.0;
            break;
        }
    }
}

} // namespace

std::vector<double> one_hot(const CategoricalVocabulary& vocab, const RawRecord& rec) {
    std::vector<double> out;
    out.reserve(vocab.one_hot_width());
    append_block(out, vocab.protocol, rec.protocol);
    append_block(out, vocab.service, rec.service);
    append_block(out, vocab.flag, rec.flag);
    return out;
}

} // namespace nids
