#include "nids/errors.hpp"
#include "nids/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

// Flags mirror PipelineConfig fields and win over the config file. File paths
// default to $NIDS_DATA_DIR/KDDTrain+.txt and KDDTest+.txt.
void add_config_flags(CLI::App* cmd, nids::PipelineConfig& cfg, std::string& config_file,
                      std::string& code_sizes_text) {
    cmd->add_option("--config", config_file, "flat key=value config file");
    cmd->add_option("--train-path", cfg.train_path, "NSL-KDD training file");
    cmd->add_option("--test-path", cfg.test_path, "NSL-KDD test file");
    cmd->add_option("--k", cfg.k, "outlier threshold multiplier");
    cmd->add_option("--c", cfg.c, "MAD consistency constant");
    cmd->add_option("--zero-ratio-threshold", cfg.zero_ratio_threshold,
                    "discard numeric features with zero ratio above this");
    cmd->add_option("--code-sizes", code_sizes_text,
                    "comma-separated autoencoder code sizes, e.g. 50,25");
    cmd->add_option("--pretrain-iters", cfg.pretrain_iters, "SCG iterations per tier");
    cmd->add_option("--finetune-iters", cfg.finetune_iters, "SCG fine-tuning iterations");
    cmd->add_option("--head-iters", cfg.head_iters, "SCG iterations for the softmax head");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--model", cfg.model, "ae or mlp");
    cmd->add_option("--out-dir", cfg.out_dir, "output directory");
}

// Layer the sources: defaults < env data dir < config file < explicit flags.
nids::PipelineConfig resolve_config(const CLI::App* cmd, const nids::PipelineConfig& flag_values,
                                    const std::string& config_file,
                                    const std::string& code_sizes_text) {
    nids::PipelineConfig cfg;
    if (const char* data_dir = std::getenv("NIDS_DATA_DIR")) {
        cfg.train_path = (fs::path(data_dir) / "KDDTrain+.txt").string();
        cfg.test_path = (fs::path(data_dir) / "KDDTest+.txt").string();
    }
    if (!config_file.empty()) cfg = nids::load_config_file(config_file, cfg);

    auto apply = [&](const char* flag, auto member) {
        if (cmd->count(flag) > 0) cfg.*member = flag_values.*member;
    };
    apply("--train-path", &nids::PipelineConfig::train_path);
    apply("--test-path", &nids::PipelineConfig::test_path);
    apply("--k", &nids::PipelineConfig::k);
    apply("--c", &nids::PipelineConfig::c);
    apply("--zero-ratio-threshold", &nids::PipelineConfig::zero_ratio_threshold);
    apply("--pretrain-iters", &nids::PipelineConfig::pretrain_iters);
    apply("--finetune-iters", &nids::PipelineConfig::finetune_iters);
    apply("--head-iters", &nids::PipelineConfig::head_iters);
    apply("--seed", &nids::PipelineConfig::seed);
    apply("--model", &nids::PipelineConfig::model);
    apply("--out-dir", &nids::PipelineConfig::out_dir);
    if (cmd->count("--code-sizes") > 0) {
        std::vector<int> sizes;
        std::stringstream in(code_sizes_text);
        std::string token;
        while (std::getline(in, token, ','))
            if (!token.empty()) sizes.push_back(std::stoi(token));
        cfg.code_sizes = sizes;
    }
    nids::validate(cfg);
    return cfg;
}

void require_paths(const nids::PipelineConfig& cfg) {
    if (cfg.train_path.empty() || cfg.test_path.empty())
        throw nids::DataError(
            "no dataset paths: pass --train-path/--test-path, a config file, "
            "or set NIDS_DATA_DIR");
}

fs::path out_path(const nids::PipelineConfig& cfg, const char* name) {
    return fs::path(cfg.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw nids::DataError("cannot write '" + path.string() + "'");
    out << text;
}

nids::PrepareResult prepare_and_cache(const nids::PipelineConfig& cfg) {
    require_paths(cfg);
    fs::create_directories(cfg.out_dir);
    nids::PrepareResult prepared = nids::run_prepare(cfg);
    const std::string hash = nids::schema_hash(prepared.outlier, prepared.schema);
    nids::save_cache(out_path(cfg, "train.cache").string(), hash, prepared.train_inputs,
                     prepared.train_labels);
    nids::save_cache(out_path(cfg, "test.cache").string(), hash, prepared.test_inputs,
                     prepared.test_labels);
    return prepared;
}

int cmd_prepare(const nids::PipelineConfig& cfg) {
    const nids::PrepareResult prepared = prepare_and_cache(cfg);
    const std::string summary = summarize(prepared);
    std::cout << summary;
    write_text(out_path(cfg, "prepare_summary.txt"), summary);
    return kExitOk;
}

// At most 12 evenly spaced points of a loss trace.
void print_trace(const std::string& name, const std::vector<double>& trace) {
    std::cout << name << " loss trace:";
    const std::size_t stride = std::max<std::size_t>(1, trace.size() / 12);
    for (std::size_t i = 0; i < trace.size(); i += stride) std::cout << " " << trace[i];
    if (!trace.empty() && (trace.size() - 1) % stride != 0)
        std::cout << " " << trace.back();
    std::cout << "\n";
}

int cmd_train(const nids::PipelineConfig& cfg) {
    const nids::PrepareResult prepared = prepare_and_cache(cfg);
    const nids::TrainResult trained = nids::run_train(cfg, prepared);

    for (const auto& [name, trace] : trained.traces) print_trace(name, trace);
    for (const auto& stage : trained.artifact.stages)
        std::cout << stage.name << ": final loss " << stage.final_loss << " after "
                  << stage.iterations << " iterations\n";
    for (const auto& warning : trained.warnings)
        std::cerr << "warning: " << warning << "\n";

    const fs::path artifact_path = out_path(cfg, "model.json");
    nids::save_artifact(artifact_path.string(), trained.artifact);
    std::cout << "artifact written to " << artifact_path.string() << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& artifact_path, std::string cache_path,
             const std::string& report_path) {
    const nids::ModelArtifact artifact = nids::load_artifact(artifact_path);
    if (cache_path.empty())
        cache_path = out_path(artifact.config, "test.cache").string();
    const nids::EncodedCache cache = nids::load_cache(cache_path);

    const std::string expected = nids::schema_hash(artifact.outlier, artifact.schema);
    if (cache.schema_hash != expected)
        throw nids::DataError("eval: cache schema hash " + cache.schema_hash +
                              " does not match artifact schema hash " + expected);

    const nids::EvalReport report = nids::run_eval(artifact, cache.inputs, cache.labels);
    std::cout << nids::render_report({report});

    fs::path json_path = report_path.empty()
                             ? out_path(artifact.config, "eval_report.json")
                             : fs::path(report_path);
    write_text(json_path, nids::report_to_json(report) + "\n");
    std::cout << "report written to " << json_path.string() << "\n";
    return kExitOk;
}

int cmd_score(const std::string& artifact_path, const std::string& input_path) {
    const nids::ModelArtifact artifact = nids::load_artifact(artifact_path);

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!input_path.empty() && input_path != "-") {
        file.open(input_path);
        if (!file) throw nids::DataError("cannot open '" + input_path + "'");
        in = &file;
    }

    std::string line;
    int line_number = 0;
    while (std::getline(*in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            const nids::RawRecord rec = nids::parse_score_line(line, line_number);
            const nids::Prediction pred = nids::score_record(artifact, rec);
            std::cout << line_number << "\t"
                      << nids::category_name(static_cast<nids::AttackCategory>(pred.cls));
            for (Eigen::Index i = 0; i < pred.probabilities.size(); ++i)
                std::cout << "\t" << pred.probabilities(i);
            std::cout << "\n";
        } catch (const nids::DataError& e) {
            std::cout << line_number << "\terror\t" << e.what() << "\n";
        }
    }
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& report_paths) {
    std::vector<nids::EvalReport> reports;
    for (const auto& path : report_paths) {
        std::ifstream in(path);
        if (!in) throw nids::DataError("cannot open report '" + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        reports.push_back(nids::report_from_json(buffer.str()));
    }
    std::cout << nids::render_report(reports);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"NSL-KDD autoencoder intrusion-detection pipeline"};
    app.require_subcommand(1);

    nids::PipelineConfig flag_values;
    std::string config_file;
    std::string code_sizes_text;

    CLI::App* prepare =
        app.add_subcommand("prepare", "parse, filter, fit and encode the dataset");
    add_config_flags(prepare, flag_values, config_file, code_sizes_text);

    CLI::App* train = app.add_subcommand("train", "run prepare, then train a model");
    add_config_flags(train, flag_values, config_file, code_sizes_text);

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate an artifact on a cache");
    std::string artifact_path;
    std::string cache_path;
    std::string report_path;
    eval_cmd->add_option("--artifact", artifact_path, "model artifact path")->required();
    eval_cmd->add_option("--cache", cache_path, "encoded test cache (defaults beside artifact)");
    eval_cmd->add_option("--report", report_path, "where to write the JSON report");

    CLI::App* score = app.add_subcommand("score", "classify raw records line by line");
    std::string score_artifact;
    std::string score_input;
    score->add_option("--artifact", score_artifact, "model artifact path")->required();
    score->add_option("--input", score_input, "input file ('-' for stdin)");

    CLI::App* report = app.add_subcommand("report", "render stored JSON eval reports");
    std::vector<std::string> report_paths;
    report->add_option("reports", report_paths, "eval report JSON files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (prepare->parsed())
            return cmd_prepare(resolve_config(prepare, flag_values, config_file, code_sizes_text));
        if (train->parsed())
            return cmd_train(resolve_config(train, flag_values, config_file, code_sizes_text));
        if (eval_cmd->parsed()) return cmd_eval(artifact_path, cache_path, report_path);
        if (score->parsed()) return cmd_score(score_artifact, score_input);
        if (report->parsed()) return cmd_report(report_paths);
    } catch (const nids::TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitTraining;
    } catch (const nids::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
