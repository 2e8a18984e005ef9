#pragma once

#include "nids/dataset.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nids {

struct ConfusionMatrix {
    // counts[truth][predicted]
    std::array<std::array<std::int64_t, kClassCount>, kClassCount> counts{};

    std::int64_t total() const;
    std::int64_t trace() const;
};

/// counts[t][p] = #{i : truth_i = t and pred_i = p}. Labels must be in
/// [0, kClassCount); the lists must have equal length.
ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

// Metrics with a zero denominator stay unset instead of collapsing to 0.
struct ClassMetrics {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f_measure;
};

/// One-vs-rest precision, recall and F-measure for class c.
ClassMetrics class_metrics(const ConfusionMatrix& m, int cls);

/// trace / total; throws DataError on an empty matrix.
double accuracy(const ConfusionMatrix& m);

struct EvalReport {
    std::string model_tag;
    ConfusionMatrix matrix;
    std::array<ClassMetrics, kClassCount> per_class;
    double overall_accuracy = 0.0;
    std::string config_hash;
};

EvalReport make_report(const std::string& model_tag, const ConfusionMatrix& m,
                       const std::string& config_hash);

// Fixed literature accuracies rendered alongside measured models in the
// comparison table.
struct ReferenceAccuracy {
    const char* model;
    double accuracy_percent;
};

const std::vector<ReferenceAccuracy>& reference_accuracies();

/// Per-class metric table plus a model-accuracy comparison table including
/// the literature reference rows. Percentages with 2 decimals; undefined
/// metrics render as "n/a". Throws DataError on an empty report list.
std::string render_report(const std::vector<EvalReport>& reports);

/// Machine-readable report: per-class metrics, accuracy, confusion counts,
/// model tag, config hash.
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

} // namespace nids
