#pragma once

#include "nids/artifact.hpp"
#include "nids/eval.hpp"
#include "nids/models.hpp"

#include <map>
#include <string>
#include <vector>

namespace nids {

using CategoryHistogram = std::map<AttackCategory, std::size_t>;

// Everything cmd_prepare produces: the fitted preprocessing state, encoded
// splits, and the stagewise counts for the summary.
struct PrepareResult {
    OutlierModel outlier;
    FeatureSchema schema;

    Eigen::MatrixXd train_inputs;
    std::vector<int> train_labels;
    Eigen::MatrixXd test_inputs;
    std::vector<int> test_labels;

    CategoryHistogram parsed_train;
    CategoryHistogram parsed_test;
    CategoryHistogram filtered_test;    // after novel-attack removal
    CategoryHistogram outlier_train;    // after outlier removal
    CategoryHistogram outlier_test;
    CategoryHistogram final_train;      // after U2R drop
    CategoryHistogram final_test;

    std::vector<double> zero_ratios;
    std::vector<std::string> discarded_features;
    int one_hot_width = 0;
    int encoded_dim = 0; // 38 numeric + one-hot width, before selection
    int input_dim = 0;   // kept numeric + one-hot width
};

/// parse -> novel-attack filter (test) -> outlier fit/filter -> U2R drop ->
/// vocabulary/zero-ratio/scaling fit -> encode. Errors carry the stage name.
PrepareResult run_prepare(const PipelineConfig& cfg);

std::string summarize(const PrepareResult& prepared);

struct TrainResult {
    ModelArtifact artifact;
    std::vector<std::string> warnings;
    // per-stage SCG loss traces, keyed like artifact.stages[i].name
    std::vector<std::pair<std::string, std::vector<double>>> traces;
};

/// Trains the configured model on prepared data and assembles the artifact.
TrainResult run_train(const PipelineConfig& cfg, const PrepareResult& prepared);

EvalReport run_eval(const ModelArtifact& artifact, const Eigen::MatrixXd& inputs,
                    const std::vector<int>& labels);

// Encoded-dataset cache (binary): schema hash + inputs + labels.
struct EncodedCache {
    std::string schema_hash;
    Eigen::MatrixXd inputs;
    std::vector<int> labels;
};

void save_cache(const std::string& path, const std::string& schema_hash,
                const Eigen::MatrixXd& inputs, const std::vector<int>& labels);
EncodedCache load_cache(const std::string& path);

/// Encode one raw record with the artifact's schema and classify it.
Prediction score_record(const ModelArtifact& artifact, const RawRecord& rec);

} // namespace nids
