#include "nids/eval.hpp"

#include "nids/errors.hpp"

#include <json.hpp>

#include <iomanip>
#include <sstream>

namespace nids {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (const auto& row : counts)
        for (auto v : row) sum += v;
    return sum;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t sum = 0;
    for (int i = 0; i < kClassCount; ++i) sum += counts[i][i];
    return sum;
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size())
        throw DataError("confusion: truth has " + std::to_string(truth.size()) +
                        " labels, predictions have " + std::to_string(predicted.size()));
    ConfusionMatrix m;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i];
        const int p = predicted[i];
        if (t < 0 || t >= kClassCount || p < 0 || p >= kClassCount)
            throw DataError("confusion: label outside the " + std::to_string(kClassCount) +
                            "-class set at index " + std::to_string(i));
        ++m.counts[t][p];
    }
    return m;
}

ClassMetrics class_metrics(const ConfusionMatrix& m, int cls) {
    if (cls < 0 || cls >= kClassCount) throw DataError("class index out of range");
    const auto c = static_cast<std::size_t>(cls);
    const std::int64_t tp = m.counts[c][c];
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    for (std::size_t other = 0; other < kClassCount; ++other) {
        if (other == c) continue;
        fp += m.counts[other][c];
        fn += m.counts[c][other];
    }

    ClassMetrics out;
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (out.precision && out.recall && *out.precision + *out.recall > 0.0)
        out.f_measure = 2.0 * (*out.precision * *out.recall) /
                        (*out.precision + *out.recall);
    return out;
}

double accuracy(const ConfusionMatrix& m) {
    const std::int64_t total = m.total();
    if (total == 0) throw DataError("accuracy of an empty confusion matrix is undefined");
    return static_cast<double>(m.trace()) / static_cast<double>(total);
}

EvalReport make_report(const std::string& model_tag, const ConfusionMatrix& m,
                       const std::string& config_hash) {
    EvalReport report;
    report.model_tag = model_tag;
    report.matrix = m;
    for (int c = 0; c < kClassCount; ++c) report.per_class[static_cast<std::size_t>(c)] = class_metrics(m, c);
    report.overall_accuracy = accuracy(m);
    report.config_hash = config_hash;
    return report;
}

const std::vector<ReferenceAccuracy>& reference_accuracies() {
    static const std::vector<ReferenceAccuracy> refs = {
        {"Huang et al.", 76.04},
        {"Abeshu et al.", 79.10},
        {"Yin et al.", 81.29},
        {"Shone et al.", 85.42},
    };
    return refs;
}

namespace {

std::string percent_or_na(const std::optional<double>& v) {
    if (!v) return "n/a";
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << (*v * 100.0);
    return out.str();
}

const char* class_display_name(int cls) {
    switch (static_cast<AttackCategory>(cls)) {
        case AttackCategory::Normal: return "Normal";
        case AttackCategory::DoS: return "DoS";
        case AttackCategory::Probe: return "Probe";
        case AttackCategory::R2L: return "R2L";
        default: return "?";
    }
}

} // namespace

std::string render_report(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw DataError("render_report: no reports");

    std::ostringstream out;
    const int name_w = 10;
    const int col_w = 12;

    out << "Per-class metrics (%)\n";
    out << std::left << std::setw(name_w) << "";
    for (const char* metric : {"Precision", "Recall", "F-measure"})
        out << std::left
            << std::setw(col_w * static_cast<int>(reports.size())) << metric;
    out << "\n";
    out << std::left << std::setw(name_w) << "Class";
    for (int metric = 0; metric < 3; ++metric)
        for (const auto& r : reports)
            out << std::right << std::setw(col_w)
                << r.model_tag.substr(0, static_cast<std::size_t>(col_w) - 2);
    out << "\n";
    for (int cls = 0; cls < kClassCount; ++cls) {
        out << std::left << std::setw(name_w) << class_display_name(cls);
        const auto c = static_cast<std::size_t>(cls);
        for (auto metric : {0, 1, 2}) {
            for (const auto& r : reports) {
                const ClassMetrics& m = r.per_class[c];
                const std::optional<double>& v =
                    metric == 0 ? m.precision : (metric == 1 ? m.recall : m.f_measure);
                out << std::right << std::setw(col_w) << percent_or_na(v);
            }
        }
        out << "\n";
    }

    out << "\nModel accuracy comparison (%)\n";
    for (const auto& r : reports) {
        std::ostringstream acc;
        acc << std::fixed << std::setprecision(2) << (r.overall_accuracy * 100.0);
        out << std::left << std::setw(24) << (r.model_tag + " (this run)") << acc.str() << "\n";
    }
    for (const auto& ref : reference_accuracies()) {
        std::ostringstream acc;
        acc << std::fixed << std::setprecision(2) << ref.accuracy_percent;
        out << std::left << std::setw(24) << ref.model << acc.str() << "\n";
    }
    return out.str();
}

namespace {

nlohmann::json metrics_json(const ClassMetrics& m) {
    nlohmann::json j;
    j["precision"] = m.precision ? nlohmann::json(*m.precision) : nlohmann::json();
    j["recall"] = m.recall ? nlohmann::json(*m.recall) : nlohmann::json();
    j["f_measure"] = m.f_measure ? nlohmann::json(*m.f_measure) : nlohmann::json();
    return j;
}

std::optional<double> metric_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["model"] = report.model_tag;
    j["accuracy"] = report.overall_accuracy;
    j["config_hash"] = report.config_hash;
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& row : report.matrix.counts) counts.push_back(row);
    j["confusion"] = counts;
    nlohmann::json per_class;
    for (int c = 0; c < kClassCount; ++c)
        per_class[category_name(static_cast<AttackCategory>(c))] =
            metrics_json(report.per_class[static_cast<std::size_t>(c)]);
    j["per_class"] = per_class;
    return j.dump(2);
}

EvalReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid report JSON: ") + e.what());
    }
    try {
        EvalReport report;
        report.model_tag = j.at("model").get<std::string>();
        report.overall_accuracy = j.at("accuracy").get<double>();
        report.config_hash = j.value("config_hash", "");
        const auto& counts = j.at("confusion");
        for (int t = 0; t < kClassCount; ++t)
            for (int p = 0; p < kClassCount; ++p)
                report.matrix.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)] =
                    counts.at(t).at(p).get<std::int64_t>();
        for (int c = 0; c < kClassCount; ++c) {
            const auto& m = j.at("per_class").at(category_name(static_cast<AttackCategory>(c)));
            auto& out = report.per_class[static_cast<std::size_t>(c)];
            out.precision = metric_from_json(m, "precision");
            out.recall = metric_from_json(m, "recall");
            out.f_measure = metric_from_json(m, "f_measure");
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report JSON missing fields: ") + e.what());
    }
}

} // namespace nids
