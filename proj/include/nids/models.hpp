#pragma once

#include "nids/neuralnet.hpp"
#include "nids/scg.hpp"

#include <string>
#include <vector>

namespace nids {

// One autoencoder tier with tied weights: the decoder matrix is the
// transpose of the encoder's and shares its storage; gradients from both
// paths accumulate into it. SatLin encode, linear decode.
struct AutoencoderTier {
    Eigen::MatrixXd encoder_weights; // fan_in x code
    Eigen::VectorXd encoder_bias;    // code
    Eigen::VectorXd decoder_bias;    // fan_in; dropped after pretraining
};

Eigen::MatrixXd tier_encode(const AutoencoderTier& tier, const Eigen::MatrixXd& inputs);

// Tier parameters pack as [encoder weights row-major, encoder bias, decoder bias].
Eigen::VectorXd pack_tier(const AutoencoderTier& tier);
AutoencoderTier unpack_tier(int fan_in, int code, const Eigen::VectorXd& theta);

/// Reconstruction-MSE objective over packed tier parameters. The callbacks
/// reference `inputs`, which must outlive them.
ScgObjective tier_objective(int fan_in, int code, const Eigen::MatrixXd& inputs);

struct PretrainResult {
    AutoencoderTier tier;
    double final_mse = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

PretrainResult pretrain_tier(const Eigen::MatrixXd& inputs, int code_size,
                             const TrainConfig& cfg);

struct GreedyPretrainResult {
    std::vector<AutoencoderTier> tiers;
    std::vector<double> tier_mse;
    std::vector<int> tier_iterations;
    std::vector<std::vector<double>> tier_traces;
};

/// Tier t trains on the frozen encodings of tiers 1..t-1. Seeds derive from
/// cfg.seed + tier index.
GreedyPretrainResult greedy_pretrain(const Eigen::MatrixXd& inputs,
                                     const std::vector<int>& code_sizes,
                                     const TrainConfig& cfg);

// SatLin encoder stack plus softmax head, trained with cross-entropy.
struct AeClassifier {
    Network network;
};

// Single SatLin hidden layer plus softmax head.
struct MlpClassifier {
    Network network;
};

struct HeadTrainResult {
    DenseLayer head;
    double final_loss = 0.0;
    int iterations = 0;
    std::vector<double> trace;
    std::vector<std::string> warnings;
};

/// Trains a softmax head on frozen codes. A class absent from the labels is
/// recorded as a warning, not an error.
HeadTrainResult train_head(const Eigen::MatrixXd& codes, const Eigen::MatrixXd& targets,
                           const TrainConfig& cfg);

AeClassifier assemble_classifier(const std::vector<AutoencoderTier>& tiers,
                                 const DenseLayer& head);

struct FineTuneResult {
    AeClassifier classifier;
    double final_loss = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

/// Joint supervised optimization of all encoder and head parameters.
FineTuneResult fine_tune(const AeClassifier& clf, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets, const TrainConfig& cfg);

struct MlpTrainResult {
    MlpClassifier classifier;
    double final_loss = 0.0;
    int iterations = 0;
    std::vector<double> trace;
    std::vector<std::string> warnings;
};

MlpTrainResult train_mlp(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         int hidden_size, const TrainConfig& cfg);

struct Prediction {
    int cls = 0;
    Eigen::VectorXd probabilities;
};

/// Argmax of the softmax output; ties break to the lowest class index.
Prediction predict(const Network& net, const Eigen::VectorXd& input);

std::vector<int> predict_batch(const Network& net, const Eigen::MatrixXd& inputs);

/// One-hot target rows over kClassCount classes.
Eigen::MatrixXd targets_from_labels(const std::vector<int>& labels);

} // namespace nids
