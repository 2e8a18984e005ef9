#include "nids/errors.hpp"
#include "nids/pipeline.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

namespace py = pybind11;
using namespace nids;

namespace {

std::map<std::string, std::size_t> histogram_dict(const CategoryHistogram& hist) {
    std::map<std::string, std::size_t> out;
    for (const auto& [cat, count] : hist) out[category_name(cat)] = count;
    return out;
}

py::dict metrics_dict(const ClassMetrics& m) {
    py::dict d;
    d["precision"] = m.precision ? py::object(py::float_(*m.precision)) : py::none();
    d["recall"] = m.recall ? py::object(py::float_(*m.recall)) : py::none();
    d["f_measure"] = m.f_measure ? py::object(py::float_(*m.f_measure)) : py::none();
    return d;
}

} // namespace

PYBIND11_MODULE(pynids, m) {
    m.doc() = "NSL-KDD autoencoder intrusion-detection pipeline";

    py::register_exception<DataError>(m, "DataError");
    py::register_exception<TrainingError>(m, "TrainingError");

    py::enum_<Split>(m, "Split")
        .value("Train", Split::Train)
        .value("Test", Split::Test);

    py::enum_<AttackCategory>(m, "AttackCategory")
        .value("Normal", AttackCategory::Normal)
        .value("DoS", AttackCategory::DoS)
        .value("Probe", AttackCategory::Probe)
        .value("R2L", AttackCategory::R2L)
        .value("U2R", AttackCategory::U2R)
        .value("Unknown", AttackCategory::Unknown);

    py::class_<RawRecord>(m, "RawRecord")
        .def(py::init<>())
        .def_readwrite("numeric", &RawRecord::numeric)
        .def_readwrite("protocol", &RawRecord::protocol)
        .def_readwrite("service", &RawRecord::service)
        .def_readwrite("flag", &RawRecord::flag)
        .def_readwrite("attack_label", &RawRecord::attack_label)
        .def_readwrite("difficulty", &RawRecord::difficulty);

    py::class_<LabeledDataset>(m, "LabeledDataset")
        .def("__len__", &LabeledDataset::size)
        .def_readonly("records", &LabeledDataset::records)
        .def_readonly("categories", &LabeledDataset::categories)
        .def_readonly("split", &LabeledDataset::split)
        .def("histogram",
             [](const LabeledDataset& ds) { return histogram_dict(class_histogram(ds)); });

    m.def("parse_split", &parse_split, py::arg("path"), py::arg("split"));
    m.def("filter_novel_test_attacks", &filter_novel_test_attacks);
    m.def("drop_category", &drop_category);
    m.def("parse_score_line", &parse_score_line, py::arg("line"), py::arg("line_number") = 1);

    py::class_<OutlierModel>(m, "OutlierModel")
        .def_readonly("median", &OutlierModel::median)
        .def_readonly("mad", &OutlierModel::mad)
        .def_readonly("c", &OutlierModel::c)
        .def_readonly("k", &OutlierModel::k);
    m.def("fit_outlier_model", &fit_outlier_model, py::arg("dataset"),
          py::arg("c") = kMadScale, py::arg("k") = kDefaultOutlierK);
    m.def("is_outlier", &is_outlier);
    m.def("filter_outliers", &filter_outliers);

    py::class_<CategoricalVocabulary>(m, "CategoricalVocabulary")
        .def_readonly("protocol", &CategoricalVocabulary::protocol)
        .def_readonly("service", &CategoricalVocabulary::service)
        .def_readonly("flag", &CategoricalVocabulary::flag)
        .def("one_hot_width", &CategoricalVocabulary::one_hot_width);
    m.def("fit_vocabulary", &fit_vocabulary);
    m.def("one_hot", &one_hot);

    m.def("compute_zero_ratios", &compute_zero_ratios);
    m.def("select_features", &select_features);

    py::class_<FeatureSchema>(m, "FeatureSchema")
        .def_readonly("kept_numeric", &FeatureSchema::kept_numeric)
        .def_readonly("zero_ratio_threshold", &FeatureSchema::zero_ratio_threshold)
        .def_readonly("scaling", &FeatureSchema::scaling)
        .def_readonly("vocab", &FeatureSchema::vocab)
        .def_readonly("input_dim", &FeatureSchema::input_dim);
    m.def("fit_schema", &fit_schema, py::arg("dataset"), py::arg("vocab"),
          py::arg("threshold") = kDefaultZeroRatioThreshold);
    m.def("encode", &encode);
    m.def("encode_dataset", &encode_dataset);

    m.def(
        "scg_minimize",
        [](const std::function<double(const Eigen::VectorXd&)>& loss_fn,
           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad_fn,
           const Eigen::VectorXd& theta0, int max_iterations, double tolerance,
           int patience) {
            ScgObjective obj{loss_fn, grad_fn};
            TrainConfig cfg;
            cfg.max_iterations = max_iterations;
            cfg.tolerance = tolerance;
            cfg.patience = patience;
            const ScgResult res = scg_minimize(obj, theta0, cfg);
            py::dict out;
            out["parameters"] = res.parameters;
            out["trace"] = res.trace;
            out["iterations"] = res.iterations;
            out["converged"] = res.converged;
            out["final_loss"] = res.final_loss;
            return out;
        },
        py::arg("loss"), py::arg("gradient"), py::arg("theta0"),
        py::arg("max_iterations") = 100, py::arg("tolerance") = 1e-7,
        py::arg("patience") = 10);
    m.def("init_parameters", &init_parameters, py::arg("dims"), py::arg("seed"));

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("train_path", &PipelineConfig::train_path)
        .def_readwrite("test_path", &PipelineConfig::test_path)
        .def_readwrite("k", &PipelineConfig::k)
        .def_readwrite("c", &PipelineConfig::c)
        .def_readwrite("zero_ratio_threshold", &PipelineConfig::zero_ratio_threshold)
        .def_readwrite("code_sizes", &PipelineConfig::code_sizes)
        .def_readwrite("pretrain_iters", &PipelineConfig::pretrain_iters)
        .def_readwrite("finetune_iters", &PipelineConfig::finetune_iters)
        .def_readwrite("head_iters", &PipelineConfig::head_iters)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("model", &PipelineConfig::model)
        .def_readwrite("out_dir", &PipelineConfig::out_dir);

    py::class_<PrepareResult>(m, "PrepareResult")
        .def_readonly("train_inputs", &PrepareResult::train_inputs)
        .def_readonly("train_labels", &PrepareResult::train_labels)
        .def_readonly("test_inputs", &PrepareResult::test_inputs)
        .def_readonly("test_labels", &PrepareResult::test_labels)
        .def_readonly("zero_ratios", &PrepareResult::zero_ratios)
        .def_readonly("discarded_features", &PrepareResult::discarded_features)
        .def_readonly("one_hot_width", &PrepareResult::one_hot_width)
        .def_readonly("encoded_dim", &PrepareResult::encoded_dim)
        .def_readonly("input_dim", &PrepareResult::input_dim)
        .def_readonly("schema", &PrepareResult::schema)
        .def_property_readonly("parsed_train",
                               [](const PrepareResult& p) { return histogram_dict(p.parsed_train); })
        .def_property_readonly("parsed_test",
                               [](const PrepareResult& p) { return histogram_dict(p.parsed_test); })
        .def_property_readonly("filtered_test",
                               [](const PrepareResult& p) { return histogram_dict(p.filtered_test); })
        .def_property_readonly("outlier_train",
                               [](const PrepareResult& p) { return histogram_dict(p.outlier_train); })
        .def_property_readonly("outlier_test",
                               [](const PrepareResult& p) { return histogram_dict(p.outlier_test); })
        .def_property_readonly("final_train",
                               [](const PrepareResult& p) { return histogram_dict(p.final_train); })
        .def_property_readonly("final_test",
                               [](const PrepareResult& p) { return histogram_dict(p.final_test); });

    m.def("run_prepare", &run_prepare);
    m.def("summarize", &summarize);

    py::class_<StageRecord>(m, "StageRecord")
        .def_readonly("name", &StageRecord::name)
        .def_readonly("final_loss", &StageRecord::final_loss)
        .def_readonly("iterations", &StageRecord::iterations);

    py::class_<ModelArtifact>(m, "ModelArtifact")
        .def_readonly("format_version", &ModelArtifact::format_version)
        .def_readonly("model_tag", &ModelArtifact::model_tag)
        .def_readonly("class_index", &ModelArtifact::class_index)
        .def_readonly("stages", &ModelArtifact::stages)
        .def_readonly("warnings", &ModelArtifact::warnings)
        .def("save", [](const ModelArtifact& a, const std::string& path) {
            save_artifact(path, a);
        });
    m.def("load_artifact", &load_artifact);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("artifact", &TrainResult::artifact)
        .def_readonly("warnings", &TrainResult::warnings);
    m.def("run_train", &run_train);

    py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
        .def_property_readonly("counts",
                               [](const ConfusionMatrix& m_) {
                                   std::vector<std::vector<std::int64_t>> rows;
                                   for (const auto& row : m_.counts)
                                       rows.emplace_back(row.begin(), row.end());
                                   return rows;
                               })
        .def("total", &ConfusionMatrix::total)
        .def("trace", &ConfusionMatrix::trace);
    m.def("confusion", &confusion);
    m.def("class_metrics",
          [](const ConfusionMatrix& m_, int cls) { return metrics_dict(class_metrics(m_, cls)); });
    m.def("accuracy", &accuracy);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("model_tag", &EvalReport::model_tag)
        .def_readonly("matrix", &EvalReport::matrix)
        .def_readonly("overall_accuracy", &EvalReport::overall_accuracy)
        .def_readonly("config_hash", &EvalReport::config_hash)
        .def_property_readonly("per_class", [](const EvalReport& r) {
            py::dict d;
            for (int c = 0; c < kClassCount; ++c)
                d[category_name(static_cast<AttackCategory>(c))] =
                    metrics_dict(r.per_class[static_cast<std::size_t>(c)]);
            return d;
        });
    m.def("run_eval", &run_eval);
    m.def("render_report",
          [](const std::vector<EvalReport>& reports) { return render_report(reports); });
    m.def("report_to_json", &report_to_json);

    m.def("score_record", [](const ModelArtifact& artifact, const RawRecord& rec) {
        const Prediction pred = score_record(artifact, rec);
        return py::make_tuple(pred.cls, pred.probabilities);
    });

    m.attr("NUMERIC_FEATURE_COUNT") = kNumericFeatureCount;
    m.attr("CLASS_COUNT") = kClassCount;
}
