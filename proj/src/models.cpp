#include "nids/models.hpp"

#include "nids/dataset.hpp"
#include "nids/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace nids {

namespace {

Eigen::MatrixXd satlin(const Eigen::MatrixXd& z) {
    return z.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::ArrayXXd satlin_mask(const Eigen::MatrixXd& activation) {
    return (activation.array() > 0.0 && activation.array() < 1.0).cast<double>();
}

void check_unit_interval(const Eigen::MatrixXd& inputs) {
    if (inputs.rows() == 0) throw std::invalid_argument("empty input matrix");
    if (inputs.minCoeff() < 0.0 || inputs.maxCoeff() > 1.0)
        throw std::invalid_argument("tier inputs must lie in [0,1]");
}

} // namespace

Eigen::MatrixXd tier_encode(const AutoencoderTier& tier, const Eigen::MatrixXd& inputs) {
    Eigen::MatrixXd z = inputs * tier.encoder_weights;
    z.rowwise() += tier.encoder_bias.transpose();
    return satlin(z);
}

Eigen::VectorXd pack_tier(const AutoencoderTier& tier) {
    const auto fan_in = tier.encoder_weights.rows();
    const auto code = tier.encoder_weights.cols();
    Eigen::VectorXd theta(fan_in * code + code + fan_in);
    Eigen::Index cursor = 0;
    for (Eigen::Index i = 0; i < fan_in; ++i) {
        theta.segment(cursor, code) = tier.encoder_weights.row(i);
        cursor += code;
    }
    theta.segment(cursor, code) = tier.encoder_bias;
    cursor += code;
    theta.segment(cursor, fan_in) = tier.decoder_bias;
    return theta;
}

AutoencoderTier unpack_tier(int fan_in, int code, const Eigen::VectorXd& theta) {
    if (theta.size() != static_cast<Eigen::Index>(fan_in) * code + code + fan_in)
        throw std::invalid_argument("tier parameter vector has wrong size");
    AutoencoderTier tier;
    tier.encoder_weights.resize(fan_in, code);
    Eigen::Index cursor = 0;
    for (int i = 0; i < fan_in; ++i) {
        tier.encoder_weights.row(i) = theta.segment(cursor, code);
        cursor += code;
    }
    tier.encoder_bias = theta.segment(cursor, code);
    cursor += code;
    tier.decoder_bias = theta.segment(cursor, fan_in);
    return tier;
}

ScgObjective tier_objective(int fan_in, int code, const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != fan_in)
        throw std::invalid_argument("tier input width does not match fan_in");
    const double denom =
        static_cast<double>(inputs.rows()) * static_cast<double>(inputs.cols());

    ScgObjective obj;
    obj.loss = [fan_in, code, &inputs, denom](const Eigen::VectorXd& theta) {
        const AutoencoderTier tier = unpack_tier(fan_in, code, theta);
        const Eigen::MatrixXd hidden = tier_encode(tier, inputs);
        Eigen::MatrixXd recon = hidden * tier.encoder_weights.transpose();
        recon.rowwise() += tier.decoder_bias.transpose();
        return (recon - inputs).squaredNorm() / denom;
    };
    obj.gradient = [fan_in, code, &inputs, denom](const Eigen::VectorXd& theta) {
        const AutoencoderTier tier = unpack_tier(fan_in, code, theta);
        const Eigen::MatrixXd hidden = tier_encode(tier, inputs);
        Eigen::MatrixXd recon = hidden * tier.encoder_weights.transpose();
        recon.rowwise() += tier.decoder_bias.transpose();

        const Eigen::MatrixXd drecon = (recon - inputs) * (2.0 / denom);
        // decoder path writes into the transposed shared matrix
        const Eigen::MatrixXd dw_decoder = drecon.transpose() * hidden; // fan_in x code
        const Eigen::VectorXd db_decoder = drecon.colwise().sum().transpose();

        const Eigen::MatrixXd dhidden = drecon * tier.encoder_weights;
        const Eigen::MatrixXd dz = (dhidden.array() * satlin_mask(hidden)).matrix();
        const Eigen::MatrixXd dw_encoder = inputs.transpose() * dz;
        const Eigen::VectorXd db_encoder = dz.colwise().sum().transpose();

        AutoencoderTier grad_tier;
        grad_tier.encoder_weights = dw_encoder + dw_decoder;
        grad_tier.encoder_bias = db_encoder;
        grad_tier.decoder_bias = db_decoder;
        return pack_tier(grad_tier);
    };
    return obj;
}

PretrainResult pretrain_tier(const Eigen::MatrixXd& inputs, int code_size,
                             const TrainConfig& cfg) {
    if (code_size <= 0) throw std::invalid_argument("code size must be positive");
    check_unit_interval(inputs);

    const int fan_in = static_cast<int>(inputs.cols());
    AutoencoderTier start;
    start.encoder_weights = glorot_matrix(fan_in, code_size, cfg.seed);
    start.encoder_bias = Eigen::VectorXd::Zero(code_size);
    start.decoder_bias = Eigen::VectorXd::Zero(fan_in);

    const auto objective = tier_objective(fan_in, code_size, inputs);
    const ScgResult opt = scg_minimize(objective, pack_tier(start), cfg);

    PretrainResult result;
    result.tier = unpack_tier(fan_in, code_size, opt.parameters);
    result.final_mse = opt.final_loss;
    result.iterations = opt.iterations;
    result.trace = opt.trace;
    return result;
}

GreedyPretrainResult greedy_pretrain(const Eigen::MatrixXd& inputs,
                                     const std::vector<int>& code_sizes,
                                     const TrainConfig& cfg) {
    if (code_sizes.empty()) throw std::invalid_argument("code_sizes must be nonempty");

    GreedyPretrainResult result;
    Eigen::MatrixXd current = inputs;
    for (std::size_t t = 0; t < code_sizes.size(); ++t) {
        TrainConfig tier_cfg = cfg;
        tier_cfg.seed = cfg.seed + t;
        PretrainResult pre = pretrain_tier(current, code_sizes[t], tier_cfg);
        current = tier_encode(pre.tier, current);
        result.tiers.push_back(std::move(pre.tier));
        result.tier_mse.push_back(pre.final_mse);
        result.tier_iterations.push_back(pre.iterations);
        result.tier_traces.push_back(std::move(pre.trace));
    }
    return result;
}

HeadTrainResult train_head(const Eigen::MatrixXd& codes, const Eigen::MatrixXd& targets,
                           const TrainConfig& cfg) {
    if (targets.cols() != kClassCount)
        throw std::invalid_argument("head targets must have one column per class");

    HeadTrainResult result;
    for (int c = 0; c < kClassCount; ++c) {
        if (targets.col(c).maxCoeff() == 0.0)
            result.warnings.push_back("class " +
                                      std::string(category_name(static_cast<AttackCategory>(c))) +
                                      " absent from training labels");
    }

    Network head_net;
    head_net.loss = LossKind::CrossEntropy;
    DenseLayer head;
    head.weights = Eigen::MatrixXd::Zero(codes.cols(), kClassCount);
    head.bias = Eigen::VectorXd::Zero(kClassCount);
    head.activation = Activation::Softmax;
    head_net.layers.push_back(head);

    const std::vector<int> dims = {static_cast<int>(codes.cols()), kClassCount};
    set_parameters(head_net, init_parameters(dims, cfg.seed));

    Batch batch{codes, targets};
    ScgObjective obj;
    obj.loss = [&head_net, &batch](const Eigen::VectorXd& theta) {
        Network net = head_net;
        set_parameters(net, theta);
        return loss(net, batch);
    };
    obj.gradient = [&head_net, &batch](const Eigen::VectorXd& theta) {
        Network net = head_net;
        set_parameters(net, theta);
        return gradient(net, batch);
    };
    const ScgResult opt = scg_minimize(obj, get_parameters(head_net), cfg);
    set_parameters(head_net, opt.parameters);

    result.head = head_net.layers.front();
    result.final_loss = opt.final_loss;
    result.iterations = opt.iterations;
    result.trace = opt.trace;
    return result;
}

AeClassifier assemble_classifier(const std::vector<AutoencoderTier>& tiers,
                                 const DenseLayer& head) {
    AeClassifier clf;
    clf.network.loss = LossKind::CrossEntropy;
    for (const auto& tier : tiers)
        clf.network.layers.push_back(
            DenseLayer{tier.encoder_weights, tier.encoder_bias, Activation::SatLin});
    clf.network.layers.push_back(head);
    validate(clf.network);
    return clf;
}

namespace {

// SCG objective over all parameters of a network on a fixed batch.
ScgObjective network_objective(const Network& reference, const Batch& batch) {
    ScgObjective obj;
    obj.loss = [&reference, &batch](const Eigen::VectorXd& theta) {
        Network net = reference;
        set_parameters(net, theta);
        return loss(net, batch);
    };
    obj.gradient = [&reference, &batch](const Eigen::VectorXd& theta) {
        Network net = reference;
        set_parameters(net, theta);
        return gradient(net, batch);
    };
    return obj;
}

} // namespace

FineTuneResult fine_tune(const AeClassifier& clf, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets, const TrainConfig& cfg) {
    FineTuneResult result;
    result.classifier = clf;

    Batch batch{inputs, targets};
    if (cfg.max_iterations == 0) {
        result.final_loss = loss(clf.network, batch);
        result.iterations = 0;
        return result;
    }

    const auto objective = network_objective(clf.network, batch);
    const ScgResult opt = scg_minimize(objective, get_parameters(clf.network), cfg);
    set_parameters(result.classifier.network, opt.parameters);
    result.final_loss = opt.final_loss;
    result.iterations = opt.iterations;
    result.trace = opt.trace;
    return result;
}

MlpTrainResult train_mlp(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         int hidden_size, const TrainConfig& cfg) {
    if (hidden_size <= 0) throw std::invalid_argument("hidden size must be positive");
    if (targets.cols() != kClassCount)
        throw std::invalid_argument("targets must have one column per class");

    MlpTrainResult result;
    for (int c = 0; c < kClassCount; ++c) {
        if (targets.col(c).maxCoeff() == 0.0)
            result.warnings.push_back("class " +
                                      std::string(category_name(static_cast<AttackCategory>(c))) +
                                      " absent from training labels");
    }

    const int input_dim = static_cast<int>(inputs.cols());
    Network net;
    net.loss = LossKind::CrossEntropy;
    net.layers.push_back(DenseLayer{Eigen::MatrixXd::Zero(input_dim, hidden_size),
                                    Eigen::VectorXd::Zero(hidden_size), Activation::SatLin});
    net.layers.push_back(DenseLayer{Eigen::MatrixXd::Zero(hidden_size, kClassCount),
                                    Eigen::VectorXd::Zero(kClassCount), Activation::Softmax});
    set_parameters(net, init_parameters({input_dim, hidden_size, kClassCount}, cfg.seed));

    Batch batch{inputs, targets};
    const auto objective = network_objective(net, batch);
    const ScgResult opt = scg_minimize(objective, get_parameters(net), cfg);
    set_parameters(net, opt.parameters);

    result.classifier.network = std::move(net);
    result.final_loss = opt.final_loss;
    result.iterations = opt.iterations;
    result.trace = opt.trace;
    return result;
}

Prediction predict(const Network& net, const Eigen::VectorXd& input) {
    Prediction pred;
    pred.probabilities = forward_one(net, input);
    pred.cls = 0;
    for (Eigen::Index i = 1; i < pred.probabilities.size(); ++i)
        if (pred.probabilities(i) > pred.probabilities(pred.cls)) pred.cls = static_cast<int>(i);
    return pred;
}

std::vector<int> predict_batch(const Network& net, const Eigen::MatrixXd& inputs) {
    const Eigen::MatrixXd output = forward(net, inputs).back();
    std::vector<int> labels(static_cast<std::size_t>(inputs.rows()));
    for (Eigen::Index i = 0; i < output.rows(); ++i) {
        int best = 0;
        for (Eigen::Index j = 1; j < output.cols(); ++j)
            if (output(i, j) > output(i, best)) best = static_cast<int>(j);
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

Eigen::MatrixXd targets_from_labels(const std::vector<int>& labels) {
    Eigen::MatrixXd targets =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), kClassCount);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= kClassCount)
            throw std::invalid_argument("label " + std::to_string(labels[i]) +
                                        " outside the " + std::to_string(kClassCount) +
                                        "-class set");
        targets(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return targets;
}

} // namespace nids
