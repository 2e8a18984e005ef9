#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nids {

enum class Activation { SatLin, Linear, Softmax };
enum class LossKind { MeanSquaredError, CrossEntropy };

struct DenseLayer {
    Eigen::MatrixXd weights; // fan_in x fan_out
    Eigen::VectorXd bias;    // fan_out
    Activation activation = Activation::Linear;
};

struct Network {
    std::vector<DenseLayer> layers;
    LossKind loss = LossKind::MeanSquaredError;
};

/// Throws std::invalid_argument when layer dimensions do not chain, Softmax
/// appears before the final layer, or CrossEntropy lacks a Softmax output.
void validate(const Network& net);

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& z);

/// Batched forward pass, rows are samples. Returns one activation matrix per
/// layer; the last entry is the network output.
std::vector<Eigen::MatrixXd> forward(const Network& net, const Eigen::MatrixXd& inputs);

Eigen::VectorXd forward_one(const Network& net, const Eigen::VectorXd& input);

struct Batch {
    Eigen::MatrixXd inputs;  // n x fan_in
    Eigen::MatrixXd targets; // n x fan_out; one-hot rows under CrossEntropy
};

/// MSE: mean over samples and components. CrossEntropy: -mean over samples of
/// sum_c t_c log(o_c) with the log argument floored at 1e-12.
double loss(const Network& net, const Batch& batch);

/// Exact gradient of loss() w.r.t. all parameters, flattened in the same
/// order as get_parameters().
Eigen::VectorXd gradient(const Network& net, const Batch& batch);

std::size_t parameter_count(const Network& net);

// Flat parameter layout: layers in forward order; each layer's weights
// row-major by input index, then its bias. The model artifact uses the same
// ordering.
Eigen::VectorXd get_parameters(const Network& net);
void set_parameters(Network& net, const Eigen::VectorXd& theta);

/// Glorot-uniform weights in [-sqrt(6/(fan_in+fan_out)), +...], zero biases,
/// flattened for the chain of layer dims (e.g. {102, 50, 4}). Deterministic
/// per seed.
Eigen::VectorXd init_parameters(const std::vector<int>& dims, std::uint64_t seed);

/// Single weight matrix drawn with the same scheme; draws row-major.
Eigen::MatrixXd glorot_matrix(int fan_in, int fan_out, std::uint64_t seed);

struct TrainConfig {
    int max_iterations = 100;
    std::uint64_t seed = 0;
    double tolerance = 1e-7; // relative loss decrease considered saturated
    int patience = 10;       // consecutive saturated successful steps before stopping
};

} // namespace nids
