#include "nids/pipeline.hpp"

#include "nids/errors.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace nids {

namespace {

constexpr char kCacheMagic[8] = {'N', 'I', 'D', 'S', 'E', 'N', 'C', '1'};

std::vector<int> labels_from_categories(const LabeledDataset& ds, const std::string& stage) {
    std::vector<int> labels;
    labels.reserve(ds.size());
    for (auto c : ds.categories) {
        const int idx = static_cast<int>(c);
        if (idx >= kClassCount)
            throw DataError(stage + ": category '" + category_name(c) +
                            "' has no class index; expected it to be filtered out");
        labels.push_back(idx);
    }
    return labels;
}

std::string histogram_line(const std::string& name, const CategoryHistogram& hist) {
    std::size_t total = 0;
    for (const auto& [cat, count] : hist) total += count;
    std::ostringstream out;
    out << std::left << std::setw(22) << name << " total=" << total;
    for (auto cat : {AttackCategory::Normal, AttackCategory::DoS, AttackCategory::Probe,
                     AttackCategory::R2L, AttackCategory::U2R, AttackCategory::Unknown}) {
        auto it = hist.find(cat);
        const std::size_t count = it == hist.end() ? 0 : it->second;
        if (cat == AttackCategory::Unknown && count == 0) continue;
        out << " " << category_name(cat) << "=" << count;
    }
    return out.str();
}

} // namespace

PrepareResult run_prepare(const PipelineConfig& cfg) {
    validate(cfg);
    PrepareResult out;

    LabeledDataset train = parse_split(cfg.train_path, Split::Train);
    LabeledDataset test = parse_split(cfg.test_path, Split::Test);
    out.parsed_train = class_histogram(train);
    out.parsed_test = class_histogram(test);

    // Vocabularies cover every symbol of the raw training split; filtering
    // below may remove the only rows carrying a rare service or flag, and
    // the encoding width must not depend on that.
    const CategoricalVocabulary vocab = fit_vocabulary(train);

    test = filter_novel_test_attacks(test);
    out.filtered_test = class_histogram(test);

    out.outlier = fit_outlier_model(train, cfg.c, cfg.k);
    train = filter_outliers(out.outlier, train);
    test = filter_outliers(out.outlier, test);
    out.outlier_train = class_histogram(train);
    out.outlier_test = class_histogram(test);

    train = drop_category(train, AttackCategory::U2R);
    test = drop_category(test, AttackCategory::U2R);
    out.final_train = class_histogram(train);
    out.final_test = class_histogram(test);
    if (train.size() == 0) throw DataError("prepare: no training records survive filtering");

    out.zero_ratios = compute_zero_ratios(train);
    out.schema = fit_schema(train, vocab, cfg.zero_ratio_threshold);
    for (int f = 0; f < kNumericFeatureCount; ++f) {
        const bool kept = std::find(out.schema.kept_numeric.begin(),
                                    out.schema.kept_numeric.end(),
                                    f) != out.schema.kept_numeric.end();
        if (!kept)
            out.discarded_features.push_back(
                numeric_feature_names()[static_cast<std::size_t>(f)]);
    }
    out.one_hot_width = static_cast<int>(vocab.one_hot_width());
    out.encoded_dim = kNumericFeatureCount + out.one_hot_width;
    out.input_dim = out.schema.input_dim;

    out.train_inputs = encode_dataset(out.schema, train);
    out.train_labels = labels_from_categories(train, "prepare");
    out.test_inputs = encode_dataset(out.schema, test);
    out.test_labels = labels_from_categories(test, "prepare");
    return out;
}

std::string summarize(const PrepareResult& prepared) {
    std::ostringstream out;
    out << histogram_line("parsed train", prepared.parsed_train) << "\n";
    out << histogram_line("parsed test", prepared.parsed_test) << "\n";
    out << histogram_line("test w/o novel", prepared.filtered_test) << "\n";
    out << histogram_line("train w/o outliers", prepared.outlier_train) << "\n";
    out << histogram_line("test w/o outliers", prepared.outlier_test) << "\n";
    out << histogram_line("train final", prepared.final_train) << "\n";
    out << histogram_line("test final", prepared.final_test) << "\n";
    out << "one-hot width: " << prepared.one_hot_width
        << " (protocol " << prepared.schema.vocab.protocol.size()
        << ", service " << prepared.schema.vocab.service.size()
        << ", flag " << prepared.schema.vocab.flag.size() << ")\n";
    out << "encoded dims: " << prepared.encoded_dim << "\n";
    out << "discarded numeric features ("
        << prepared.discarded_features.size() << " of " << kNumericFeatureCount << "):";
    for (const auto& name : prepared.discarded_features) out << " " << name;
    out << "\n";
    out << "model input dims: " << prepared.input_dim << "\n";
    return out.str();
}

TrainResult run_train(const PipelineConfig& cfg, const PrepareResult& prepared) {
    validate(cfg);
    TrainResult result;
    ModelArtifact& artifact = result.artifact;
    artifact.outlier = prepared.outlier;
    artifact.schema = prepared.schema;
    artifact.class_index = default_class_index();
    artifact.config = cfg;

    const Eigen::MatrixXd targets = targets_from_labels(prepared.train_labels);

    std::ostringstream tag;
    if (cfg.model == "ae") {
        tag << "ae[";
        for (std::size_t i = 0; i < cfg.code_sizes.size(); ++i)
            tag << (i ? "," : "") << cfg.code_sizes[i];
        tag << "]";

        TrainConfig pre_cfg{cfg.pretrain_iters, cfg.seed};
        GreedyPretrainResult greedy =
            greedy_pretrain(prepared.train_inputs, cfg.code_sizes, pre_cfg);
        for (std::size_t t = 0; t < greedy.tiers.size(); ++t) {
            const std::string name = "pretrain_tier_" + std::to_string(t + 1);
            artifact.stages.push_back(
                StageRecord{name, greedy.tier_mse[t], greedy.tier_iterations[t]});
            result.traces.emplace_back(name, greedy.tier_traces[t]);
        }

        Eigen::MatrixXd codes = prepared.train_inputs;
        for (const auto& tier : greedy.tiers) codes = tier_encode(tier, codes);

        TrainConfig head_cfg{cfg.head_iters, cfg.seed + cfg.code_sizes.size()};
        HeadTrainResult head = train_head(codes, targets, head_cfg);
        artifact.stages.push_back(StageRecord{"head", head.final_loss, head.iterations});
        result.traces.emplace_back("head", head.trace);
        result.warnings = head.warnings;

        AeClassifier clf = assemble_classifier(greedy.tiers, head.head);
        TrainConfig tune_cfg{cfg.finetune_iters, cfg.seed};
        FineTuneResult tuned = fine_tune(clf, prepared.train_inputs, targets, tune_cfg);
        artifact.stages.push_back(
            StageRecord{"fine_tune", tuned.final_loss, tuned.iterations});
        result.traces.emplace_back("fine_tune", tuned.trace);
        artifact.network = std::move(tuned.classifier.network);
    } else {
        const int hidden = cfg.code_sizes.front();
        tag << "mlp[" << hidden << "]";
        TrainConfig mlp_cfg{cfg.finetune_iters, cfg.seed};
        MlpTrainResult mlp = train_mlp(prepared.train_inputs, targets, hidden, mlp_cfg);
        artifact.stages.push_back(StageRecord{"mlp", mlp.final_loss, mlp.iterations});
        result.traces.emplace_back("mlp", mlp.trace);
        artifact.network = std::move(mlp.classifier.network);
        result.warnings = mlp.warnings;
    }

    artifact.model_tag = tag.str();
    artifact.warnings = result.warnings;
    return result;
}

EvalReport run_eval(const ModelArtifact& artifact, const Eigen::MatrixXd& inputs,
                    const std::vector<int>& labels) {
    if (inputs.rows() != static_cast<Eigen::Index>(labels.size()))
        throw DataError("eval: inputs and labels disagree on record count");
    if (inputs.cols() != artifact.schema.input_dim)
        throw DataError("eval: encoded width " + std::to_string(inputs.cols()) +
                        " does not match the artifact schema input_dim " +
                        std::to_string(artifact.schema.input_dim));
    const std::vector<int> predicted = predict_batch(artifact.network, inputs);
    return make_report(artifact.model_tag, confusion(labels, predicted),
                       config_hash(artifact.config));
}

void save_cache(const std::string& path, const std::string& schema_hash_hex,
                const Eigen::MatrixXd& inputs, const std::vector<int>& labels) {
    if (inputs.rows() != static_cast<Eigen::Index>(labels.size()))
        throw DataError("cache: inputs and labels disagree on record count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write cache '" + path + "'");

    out.write(kCacheMagic, sizeof(kCacheMagic));
    const std::uint32_t hash_len = static_cast<std::uint32_t>(schema_hash_hex.size());
    out.write(reinterpret_cast<const char*>(&hash_len), sizeof(hash_len));
    out.write(schema_hash_hex.data(), hash_len);
    const std::uint64_t rows = static_cast<std::uint64_t>(inputs.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(inputs.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    for (Eigen::Index i = 0; i < inputs.rows(); ++i)
        for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
            const double v = inputs(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    for (int label : labels) {
        const std::int32_t v = label;
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    if (!out) throw DataError("failed writing cache '" + path + "'");
}

EncodedCache load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open cache '" + path + "'");

    char magic[sizeof(kCacheMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(kCacheMagic)) != 0)
        throw DataError("'" + path + "' is not an encoded-dataset cache");

    EncodedCache cache;
    std::uint32_t hash_len = 0;
    in.read(reinterpret_cast<char*>(&hash_len), sizeof(hash_len));
    if (!in || hash_len > 1024) throw DataError("cache '" + path + "' is corrupt");
    cache.schema_hash.resize(hash_len);
    in.read(cache.schema_hash.data(), hash_len);

    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in) throw DataError("cache '" + path + "' is truncated");

    cache.inputs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            cache.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    cache.labels.resize(rows);
    for (std::uint64_t i = 0; i < rows; ++i) {
        std::int32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        cache.labels[i] = v;
    }
    if (!in) throw DataError("cache '" + path + "' is truncated");
    return cache;
}

Prediction score_record(const ModelArtifact& artifact, const RawRecord& rec) {
    const auto encoded = encode(artifact.schema, rec);
    Eigen::VectorXd x =
        Eigen::Map<const Eigen::VectorXd>(encoded.data(),
                                          static_cast<Eigen::Index>(encoded.size()));
    return predict(artifact.network, x);
}

} // namespace nids
