// Acceptance suite. Runs the end-to-end criteria against the real NSL-KDD
// files (KDDTrain+.txt / KDDTest+.txt under --data-dir or $NIDS_DATA_DIR) and
// a dataset-free property suite. Prints one PASS/FAIL/SKIP line per
// criterion.
//
//   --properties-only   run only the property criterion (9)
//   --dataset-only      run only the dataset criteria (1-8); exits 77 when
//                       the dataset files are absent
//
// Exit codes: 0 all executed criteria passed, 1 any failed, 77 dataset-only
// run without dataset files.

#include "nids/errors.hpp"
#include "nids/pipeline.hpp"

#include "testutil.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nids;

namespace {

struct Outcome {
    int criterion;
    std::string name;
    std::string status; // PASS / FAIL / SKIP
    std::string detail;
};

std::vector<Outcome> g_outcomes;

void record(int criterion, const std::string& name, bool pass, const std::string& detail) {
    g_outcomes.push_back({criterion, name, pass ? "PASS" : "FAIL", detail});
}

void record_skip(int criterion, const std::string& name, const std::string& detail) {
    g_outcomes.push_back({criterion, name, "SKIP", detail});
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool condition, const std::string& what) {
        if (detail.tellp() > 0) detail << "; ";
        detail << what;
        if (!condition) {
            ok = false;
            detail << " [FAILED]";
        }
    }
};

std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

// ---------------------------------------------------------------------------
// Dataset criteria (1-8)

struct DatasetRun {
    PipelineConfig config;
    PrepareResult prepared;
    // per-seed reports, seed order {1,2,3}
    std::vector<EvalReport> ae_reports;
    std::vector<EvalReport> mlp_reports;
    double ae_tier_mse = 0.0;
};

PipelineConfig dataset_config(const std::string& data_dir) {
    PipelineConfig cfg;
    cfg.train_path = (fs::path(data_dir) / "KDDTrain+.txt").string();
    cfg.test_path = (fs::path(data_dir) / "KDDTest+.txt").string();
    return cfg;
}

std::size_t histogram_total(const CategoryHistogram& hist) {
    std::size_t total = 0;
    for (const auto& [cat, count] : hist) total += count;
    return total;
}

void criterion_1_dataset_fidelity(const DatasetRun& run) {
    Check c;
    const auto& train = run.prepared.parsed_train;
    c.expect(histogram_total(train) == 125973,
             "train total " + std::to_string(histogram_total(train)) + " == 125973");
    c.expect(train.at(AttackCategory::Normal) == 67343, "train normal == 67343");
    c.expect(train.at(AttackCategory::DoS) == 45927, "train dos == 45927");
    c.expect(train.at(AttackCategory::Probe) == 11656, "train probe == 11656");
    c.expect(train.at(AttackCategory::R2L) == 995, "train r2l == 995");
    c.expect(train.at(AttackCategory::U2R) == 52, "train u2r == 52");

    const auto& test = run.prepared.filtered_test;
    c.expect(histogram_total(test) == 18793,
             "filtered test total " + std::to_string(histogram_total(test)) + " == 18793");
    c.expect(test.at(AttackCategory::Normal) == 9710, "test normal == 9710");
    c.expect(test.at(AttackCategory::DoS) == 5741, "test dos == 5741");
    c.expect(test.at(AttackCategory::Probe) == 1106, "test probe == 1106");
    c.expect(test.at(AttackCategory::R2L) == 2199, "test r2l == 2199");
    c.expect(test.at(AttackCategory::U2R) == 37, "test u2r == 37");
    record(1, "dataset composition (exact class counts)", c.ok, c.detail.str());
}

void criterion_2_encoding_dims(const DatasetRun& run) {
    Check c;
    c.expect(run.prepared.one_hot_width == 84,
             "one-hot width " + std::to_string(run.prepared.one_hot_width) + " == 84");
    c.expect(run.prepared.encoded_dim == 122,
             "encoded dim " + std::to_string(run.prepared.encoded_dim) + " == 122");
    c.expect(run.prepared.input_dim == 102,
             "selected input dim " + std::to_string(run.prepared.input_dim) + " == 102");
    record(2, "encoding dimensions 84/122/102 (exact)", c.ok, c.detail.str());
}

void criterion_3_feature_selection(const DatasetRun& run) {
    const auto discarded = static_cast<int>(run.prepared.discarded_features.size());
    Check c;
    c.expect(discarded >= 18 && discarded <= 22,
             "discarded features " + std::to_string(discarded) + " within 20 +/- 2");
    record(3, "feature selection at the 80% threshold", c.ok, c.detail.str());
}

void criterion_4_outlier_counts(const DatasetRun& run) {
    const auto train = static_cast<double>(histogram_total(run.prepared.outlier_train));
    const auto test = static_cast<double>(histogram_total(run.prepared.outlier_test));
    Check c;
    c.expect(train >= 85421.0 * 0.95 && train <= 85421.0 * 1.05,
             "post-outlier train " + fmt(train) + " within 85421 +/- 5%");
    c.expect(test >= 11925.0 * 0.95 && test <= 11925.0 * 1.05,
             "post-outlier test " + fmt(test) + " within 11925 +/- 5%");
    record(4, "outlier removal scale (+/- 5%)", c.ok, c.detail.str());
}

void criterion_5_pretrain_quality(const DatasetRun& run) {
    Check c;
    c.expect(run.ae_tier_mse <= 0.02,
             "AE[50] reconstruction MSE " + fmt(run.ae_tier_mse) + " <= 0.02");
    record(5, "pretraining quality (MSE <= 0.02)", c.ok, c.detail.str());
}

void criterion_6_headline_accuracy(const DatasetRun& run) {
    double ae_mean = 0.0;
    double mlp_mean = 0.0;
    for (const auto& r : run.ae_reports) ae_mean += r.overall_accuracy;
    for (const auto& r : run.mlp_reports) mlp_mean += r.overall_accuracy;
    ae_mean /= static_cast<double>(run.ae_reports.size());
    mlp_mean /= static_cast<double>(run.mlp_reports.size());

    Check c;
    c.expect(ae_mean >= 0.84 && ae_mean <= 0.90,
             "AE[50] mean accuracy " + fmt(ae_mean) + " in [0.84, 0.90]");
    c.expect(mlp_mean >= 0.78 && mlp_mean <= 0.84,
             "MLP mean accuracy " + fmt(mlp_mean) + " in [0.78, 0.84]");
    record(6, "headline accuracy over 3 seeds", c.ok, c.detail.str());
}

void criterion_7_depth_ordering(const DatasetRun& run) {
    // same seed as the first headline run
    PipelineConfig cfg = run.config;
    cfg.seed = 1;

    cfg.code_sizes = {50, 25};
    const TrainResult two = run_train(cfg, run.prepared);
    const double acc_two =
        run_eval(two.artifact, run.prepared.test_inputs, run.prepared.test_labels)
            .overall_accuracy;

    cfg.code_sizes = {50, 25, 12};
    const TrainResult three = run_train(cfg, run.prepared);
    const double acc_three =
        run_eval(three.artifact, run.prepared.test_inputs, run.prepared.test_labels)
            .overall_accuracy;

    const double acc_one = run.ae_reports.front().overall_accuracy;
    Check c;
    c.expect(acc_one >= acc_two, "AE[50] " + fmt(acc_one) + " >= AE[50,25] " + fmt(acc_two));
    c.expect(acc_one >= acc_three,
             "AE[50] " + fmt(acc_one) + " >= AE[50,25,12] " + fmt(acc_three));
    record(7, "depth ordering on one seed", c.ok, c.detail.str());
}

void criterion_8_per_class_pattern(const DatasetRun& run) {
    const auto& ae = run.ae_reports.front();
    const auto& mlp = run.mlp_reports.front();
    const auto f = [](const EvalReport& r, AttackCategory cat) {
        const auto& m = r.per_class[static_cast<std::size_t>(cat)];
        return m.f_measure ? *m.f_measure : 0.0;
    };

    Check c;
    c.expect(f(ae, AttackCategory::DoS) >= 0.95,
             "AE F(DoS) " + fmt(f(ae, AttackCategory::DoS)) + " >= 0.95");
    c.expect(f(ae, AttackCategory::Normal) >= 0.85,
             "AE F(Normal) " + fmt(f(ae, AttackCategory::Normal)) + " >= 0.85");
    c.expect(f(mlp, AttackCategory::R2L) < 0.30,
             "MLP F(R2L) " + fmt(f(mlp, AttackCategory::R2L)) + " < 0.30");
    c.expect(f(ae, AttackCategory::R2L) > f(mlp, AttackCategory::R2L),
             "AE F(R2L) " + fmt(f(ae, AttackCategory::R2L)) + " > MLP F(R2L) " +
                 fmt(f(mlp, AttackCategory::R2L)));
    record(8, "per-class metric pattern (wide bands)", c.ok, c.detail.str());
}

int run_dataset_criteria(const std::string& data_dir) {
    const PipelineConfig cfg = dataset_config(data_dir);
    if (!fs::exists(cfg.train_path) || !fs::exists(cfg.test_path)) {
        const char* names[] = {
            "dataset composition (exact class counts)",
            "encoding dimensions 84/122/102 (exact)",
            "feature selection at the 80% threshold",
            "outlier removal scale (+/- 5%)",
            "pretraining quality (MSE <= 0.02)",
            "headline accuracy over 3 seeds",
            "depth ordering on one seed",
            "per-class metric pattern (wide bands)",
        };
        for (int i = 1; i <= 8; ++i)
            record_skip(i, names[i - 1],
                        "NSL-KDD files not found under '" + data_dir +
                            "' (set NIDS_DATA_DIR or --data-dir)");
        return 77;
    }

    DatasetRun run;
    run.config = cfg;
    std::cerr << "[acceptance] preparing dataset...\n";
    run.prepared = run_prepare(cfg);

    criterion_1_dataset_fidelity(run);
    criterion_2_encoding_dims(run);
    criterion_3_feature_selection(run);
    criterion_4_outlier_counts(run);

    // one full AE + MLP training per seed; seed 1 doubles for criteria 7-8
    for (std::uint64_t seed : {1, 2, 3}) {
        std::cerr << "[acceptance] training ae[50], seed " << seed << "...\n";
        PipelineConfig ae_cfg = cfg;
        ae_cfg.seed = seed;
        const TrainResult ae = run_train(ae_cfg, run.prepared);
        if (seed == 1)
            for (const auto& stage : ae.artifact.stages)
                if (stage.name == "pretrain_tier_1") run.ae_tier_mse = stage.final_loss;
        run.ae_reports.push_back(
            run_eval(ae.artifact, run.prepared.test_inputs, run.prepared.test_labels));

        std::cerr << "[acceptance] training mlp[50], seed " << seed << "...\n";
        PipelineConfig mlp_cfg = cfg;
        mlp_cfg.seed = seed;
        mlp_cfg.model = "mlp";
        const TrainResult mlp = run_train(mlp_cfg, run.prepared);
        run.mlp_reports.push_back(
            run_eval(mlp.artifact, run.prepared.test_inputs, run.prepared.test_labels));
    }

    criterion_5_pretrain_quality(run);
    criterion_6_headline_accuracy(run);
    criterion_7_depth_ordering(run);
    criterion_8_per_class_pattern(run);
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 9: dataset-free property suite

bool property_gradient_checks(Check& c) {
    using testutil::finite_difference_gradient;
    using testutil::random_matrix;
    using testutil::random_network;
    using testutil::relative_error;

    bool all = true;
    const struct {
        std::vector<int> dims;
        std::vector<Activation> acts;
        LossKind loss;
        bool one_hot;
    } cases[] = {
        {{6, 4}, {Activation::SatLin}, LossKind::MeanSquaredError, false},
        {{6, 4, 3}, {Activation::SatLin, Activation::Linear}, LossKind::MeanSquaredError, false},
        {{6, 5, 4}, {Activation::SatLin, Activation::Softmax}, LossKind::CrossEntropy, true},
    };
    for (const auto& tc : cases) {
        for (std::uint64_t seed : {101, 202}) {
            Network net = random_network(tc.dims, tc.acts, tc.loss, seed);
            for (auto& layer : net.layers) layer.weights *= 0.35;
            Batch batch;
            batch.inputs = random_matrix(5, tc.dims.front(), seed + 7, 0.05, 0.95);
            if (tc.one_hot) {
                batch.targets = Eigen::MatrixXd::Zero(5, tc.dims.back());
                for (int i = 0; i < 5; ++i) batch.targets(i, i % tc.dims.back()) = 1.0;
            } else {
                batch.targets = random_matrix(5, tc.dims.back(), seed + 8, 0.1, 0.9);
            }
            const Eigen::VectorXd analytic = gradient(net, batch);
            const Eigen::VectorXd numeric = finite_difference_gradient(
                [&](const Eigen::VectorXd& theta) {
                    Network probe = net;
                    set_parameters(probe, theta);
                    return loss(probe, batch);
                },
                get_parameters(net));
            all = all && relative_error(analytic, numeric) < 1e-5;
        }
    }

    // tied-weight tier
    const Eigen::MatrixXd inputs = random_matrix(8, 6, 303, 0.05, 0.95);
    const auto obj = tier_objective(6, 3, inputs);
    AutoencoderTier tier;
    tier.encoder_weights = glorot_matrix(6, 3, 304) * 0.5;
    tier.encoder_bias = Eigen::VectorXd::Constant(3, 0.05);
    tier.decoder_bias = Eigen::VectorXd::Constant(6, -0.02);
    const Eigen::VectorXd theta = pack_tier(tier);
    all = all && relative_error(obj.gradient(theta),
                                finite_difference_gradient(obj.loss, theta)) < 1e-5;

    c.expect(all, "gradients match finite differences (rel err < 1e-5, tied tiers included)");
    return all;
}

void criterion_9_properties() {
    Check c;

    property_gradient_checks(c);

    { // softmax normalization
        bool ok = true;
        for (std::uint64_t seed : {1, 2, 3}) {
            const Eigen::MatrixXd z = testutil::random_matrix(40, 5, seed, -25.0, 25.0);
            const Eigen::MatrixXd a = apply_activation(Activation::Softmax, z);
            if (a.minCoeff() <= 0.0) ok = false;
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                if (std::abs(a.row(i).sum() - 1.0) > 1e-9) ok = false;
        }
        c.expect(ok, "softmax rows positive, sums within 1e-9 of 1");
    }

    { // SCG on a convex quadratic
        const Eigen::VectorXd center = Eigen::VectorXd::LinSpaced(10, -2.0, 4.0);
        ScgObjective obj;
        obj.loss = [center](const Eigen::VectorXd& t) { return (t - center).squaredNorm(); };
        obj.gradient = [center](const Eigen::VectorXd& t) {
            return Eigen::VectorXd(2.0 * (t - center));
        };
        TrainConfig cfg;
        cfg.max_iterations = 50;
        const ScgResult res =
            scg_minimize(obj, Eigen::VectorXd::Constant(10, 9.0), cfg);
        c.expect((res.parameters - center).norm() < 1e-6 && res.iterations <= 50,
                 "SCG solves a convex quadratic to 1e-6 in <= 50 iterations");
    }

    { // metric oracles
        const auto m = confusion({0, 0, 1}, {0, 1, 1});
        bool ok = m.counts[0][0] == 1 && m.counts[0][1] == 1 && m.counts[1][1] == 1;
        ConfusionMatrix hand;
        hand.counts[0][0] = 3;
        hand.counts[1][0] = 1;
        hand.counts[0][1] = 1;
        const auto metrics = class_metrics(hand, 0);
        ok = ok && metrics.precision && std::abs(*metrics.precision - 0.75) < 1e-15;
        ok = ok && metrics.recall && std::abs(*metrics.recall - 0.75) < 1e-15;
        ok = ok && metrics.f_measure && std::abs(*metrics.f_measure - 0.75) < 1e-15;
        ConfusionMatrix ninety;
        ninety.counts[0][0] = 50;
        ninety.counts[1][1] = 40;
        ninety.counts[2][3] = 10;
        ok = ok && std::abs(accuracy(ninety) - 0.9) < 1e-15;
        c.expect(ok, "confusion/metric operations match hand-computed oracles");
    }

    { // outlier filter idempotence + one-hot block invariant
        testutil::SyntheticSpec spec;
        spec.extreme = 3;
        spec.seed = 13;
        testutil::TempDir dir("accept_prop");
        testutil::write_file(dir.path() / "train.txt", testutil::synthetic_text(spec));
        const auto ds = parse_split((dir.path() / "train.txt").string(), Split::Train);
        const auto model = fit_outlier_model(ds);
        const auto once = filter_outliers(model, ds);
        const auto twice = filter_outliers(model, once);
        c.expect(once.size() < ds.size() && once.size() == twice.size(),
                 "outlier filter removes the extremes and is idempotent");

        const auto vocab = fit_vocabulary(ds);
        bool ok = true;
        for (const auto& rec : ds.records) {
            const auto v = one_hot(vocab, rec);
            double proto = 0, service = 0, flag = 0;
            std::size_t i = 0;
            for (std::size_t k = 0; k < vocab.protocol.size(); ++k) proto += v[i++];
            for (std::size_t k = 0; k < vocab.service.size(); ++k) service += v[i++];
            for (std::size_t k = 0; k < vocab.flag.size(); ++k) flag += v[i++];
            ok = ok && proto == 1.0 && service == 1.0 && flag == 1.0;
        }
        RawRecord unseen;
        unseen.protocol = "sctp";
        unseen.service = "unknown_svc";
        unseen.flag = "OTH";
        const auto v = one_hot(vocab, unseen);
        double total = 0;
        for (double x : v) total += x;
        c.expect(ok && total == 0.0, "one-hot blocks sum to 1 in vocabulary, 0 outside");
    }

    { // fixed-seed bit reproducibility of a small end-to-end training
        testutil::SyntheticSpec spec;
        spec.seed = 21;
        testutil::TempDir dir("accept_repro");
        testutil::write_file(dir.path() / "train.txt", testutil::synthetic_text(spec));
        testutil::write_file(dir.path() / "test.txt", testutil::synthetic_text(spec));
        PipelineConfig cfg;
        cfg.train_path = (dir.path() / "train.txt").string();
        cfg.test_path = (dir.path() / "test.txt").string();
        cfg.code_sizes = {8};
        cfg.pretrain_iters = 25;
        cfg.head_iters = 25;
        cfg.finetune_iters = 25;
        cfg.seed = 7;
        const PrepareResult prepared = run_prepare(cfg);
        const Eigen::VectorXd a = get_parameters(run_train(cfg, prepared).artifact.network);
        const Eigen::VectorXd b = get_parameters(run_train(cfg, prepared).artifact.network);
        bool identical = a.size() == b.size();
        for (Eigen::Index i = 0; identical && i < a.size(); ++i) identical = a(i) == b(i);
        c.expect(identical, "fixed-seed training is bit-reproducible");

        // artifact save/load round trip equality
        const TrainResult trained = run_train(cfg, prepared);
        const auto path = (dir.path() / "model.json").string();
        save_artifact(path, trained.artifact);
        const ModelArtifact loaded = load_artifact(path);
        const Eigen::VectorXd before = get_parameters(trained.artifact.network);
        const Eigen::VectorXd after = get_parameters(loaded.network);
        bool equal = before.size() == after.size();
        for (Eigen::Index i = 0; equal && i < before.size(); ++i)
            equal = before(i) == after(i);
        const EvalReport mem =
            run_eval(trained.artifact, prepared.test_inputs, prepared.test_labels);
        const EvalReport disk = run_eval(loaded, prepared.test_inputs, prepared.test_labels);
        c.expect(equal && mem.matrix.counts == disk.matrix.counts &&
                     mem.overall_accuracy == disk.overall_accuracy,
                 "artifact save/load round trip is exact");
    }

    record(9, "property suite (no dataset)", c.ok, c.detail.str());
}

} // namespace

int main(int argc, char** argv) {
    bool properties_only = false;
    bool dataset_only = false;
    std::string data_dir;
    if (const char* env = std::getenv("NIDS_DATA_DIR")) data_dir = env;

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--properties-only") properties_only = true;
        else if (arg == "--dataset-only") dataset_only = true;
        else if (arg == "--data-dir" && i + 1 < argc) data_dir = argv[++i];
        else {
            std::cerr << "unknown argument: " << arg << "\n";
            return 1;
        }
    }
    if (data_dir.empty()) data_dir = "data";

    int skip_code = 0;
    try {
        if (!properties_only) {
            const int rc = run_dataset_criteria(data_dir);
            if (rc == 77 && dataset_only) skip_code = 77;
        }
        if (!dataset_only) criterion_9_properties();
    } catch (const std::exception& e) {
        std::cerr << "acceptance run aborted: " << e.what() << "\n";
        return 1;
    }

    bool any_fail = false;
    for (const auto& o : g_outcomes) {
        std::cout << o.status << " criterion " << o.criterion << ": " << o.name;
        if (!o.detail.empty()) std::cout << " -- " << o.detail;
        std::cout << "\n";
        any_fail = any_fail || o.status == "FAIL";
    }
    if (any_fail) return 1;
    return skip_code;
}
