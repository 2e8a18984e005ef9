#include "nids/neuralnet.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace nids {

namespace {

constexpr double kLogFloor = 1e-12;

// Uniform double in [0,1) from the generator's top 53 bits; keeps the draw
// sequence identical across standard library implementations.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_batch(const Network& net, const Batch& batch) {
    if (net.layers.empty()) throw std::invalid_argument("network has no layers");
    if (batch.inputs.cols() != net.layers.front().weights.rows())
        throw std::invalid_argument("batch input dimension " +
                                    std::to_string(batch.inputs.cols()) +
                                    " does not match first layer fan_in " +
                                    std::to_string(net.layers.front().weights.rows()));
    if (batch.targets.cols() != net.layers.back().weights.cols())
        throw std::invalid_argument("batch target dimension does not match output layer");
    if (batch.inputs.rows() != batch.targets.rows())
        throw std::invalid_argument("batch inputs and targets disagree on sample count");
    if (batch.inputs.rows() == 0) throw std::invalid_argument("empty batch");
}

void check_one_hot_targets(const Eigen::MatrixXd& targets) {
    for (Eigen::Index i = 0; i < targets.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < targets.cols(); ++j) {
            const double t = targets(i, j);
            if (t != 0.0 && t != 1.0)
                throw std::invalid_argument("cross-entropy target row " + std::to_string(i) +
                                            " is not one-hot");
            sum += t;
        }
        if (sum != 1.0)
            throw std::invalid_argument("cross-entropy target row " + std::to_string(i) +
                                        " is not one-hot");
    }
}

// SatLin derivative from the activation value: 1 on (0,1), 0 at the clamped
// boundaries and outside.
Eigen::ArrayXXd satlin_mask(const Eigen::MatrixXd& activation) {
    return (activation.array() > 0.0 && activation.array() < 1.0).cast<double>();
}

} // namespace

void validate(const Network& net) {
    if (net.layers.empty()) throw std::invalid_argument("network has no layers");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        if (layer.weights.rows() == 0 || layer.weights.cols() == 0)
            throw std::invalid_argument("layer " + std::to_string(l) + " has empty weights");
        if (layer.bias.size() != layer.weights.cols())
            throw std::invalid_argument("layer " + std::to_string(l) +
                                        " bias size does not match fan_out");
        if (!layer.weights.allFinite() || !layer.bias.allFinite())
            throw std::invalid_argument("layer " + std::to_string(l) +
                                        " has non-finite parameters");
        if (l + 1 < net.layers.size()) {
            if (layer.weights.cols() != net.layers[l + 1].weights.rows())
                throw std::invalid_argument("layer " + std::to_string(l) +
                                            " fan_out does not chain into layer " +
                                            std::to_string(l + 1));
            if (layer.activation == Activation::Softmax)
                throw std::invalid_argument("softmax is only valid as the final activation");
        }
    }
    if (net.loss == LossKind::CrossEntropy &&
        net.layers.back().activation != Activation::Softmax)
        throw std::invalid_argument("cross-entropy requires a softmax output layer");
}

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& z) {
    switch (act) {
        case Activation::Linear:
            return z;
        case Activation::SatLin:
            return z.cwiseMax(0.0).cwiseMin(1.0);
        case Activation::Softmax: {
            Eigen::MatrixXd out(z.rows(), z.cols());
            for (Eigen::Index i = 0; i < z.rows(); ++i) {
                const double zmax = z.row(i).maxCoeff();
                Eigen::ArrayXd e = (z.row(i).array() - zmax).exp();
                out.row(i) = (e / e.sum()).matrix();
            }
            return out;
        }
    }
    throw std::invalid_argument("unknown activation");
}

std::vector<Eigen::MatrixXd> forward(const Network& net, const Eigen::MatrixXd& inputs) {
    if (net.layers.empty()) throw std::invalid_argument("network has no layers");
    if (inputs.cols() != net.layers.front().weights.rows())
        throw std::invalid_argument("input dimension " + std::to_string(inputs.cols()) +
                                    " does not match first layer fan_in " +
                                    std::to_string(net.layers.front().weights.rows()));
    std::vector<Eigen::MatrixXd> activations;
    activations.reserve(net.layers.size());
    const Eigen::MatrixXd* current = &inputs;
    for (const auto& layer : net.layers) {
        Eigen::MatrixXd z = (*current) * layer.weights;
        z.rowwise() += layer.bias.transpose();
        activations.push_back(apply_activation(layer.activation, z));
        current = &activations.back();
    }
    return activations;
}

Eigen::VectorXd forward_one(const Network& net, const Eigen::VectorXd& input) {
    const auto acts = forward(net, input.transpose());
    return acts.back().row(0).transpose();
}

double loss(const Network& net, const Batch& batch) {
    check_batch(net, batch);
    const auto activations = forward(net, batch.inputs);
    const Eigen::MatrixXd& output = activations.back();
    const auto n = static_cast<double>(batch.inputs.rows());
    switch (net.loss) {
        case LossKind::MeanSquaredError:
            return (output - batch.targets).squaredNorm() /
                   (n * static_cast<double>(output.cols()));
        case LossKind::CrossEntropy: {
            check_one_hot_targets(batch.targets);
            const Eigen::ArrayXXd logo = output.array().max(kLogFloor).log();
            return -(batch.targets.array() * logo).sum() / n;
        }
    }
    throw std::invalid_argument("unknown loss kind");
}

Eigen::VectorXd gradient(const Network& net, const Batch& batch) {
    check_batch(net, batch);
    const auto activations = forward(net, batch.inputs);
    const Eigen::MatrixXd& output = activations.back();
    const auto n = static_cast<double>(batch.inputs.rows());
    const auto L = net.layers.size();

    // Delta at the output pre-activation.
    Eigen::MatrixXd delta;
    const Activation out_act = net.layers.back().activation;
    if (net.loss == LossKind::CrossEntropy) {
        check_one_hot_targets(batch.targets);
        // softmax + cross-entropy collapses to (o - t) / n
        delta = (output - batch.targets) / n;
    } else {
        Eigen::MatrixXd dloss =
            (output - batch.targets) * (2.0 / (n * static_cast<double>(output.cols())));
        switch (out_act) {
            case Activation::Linear:
                delta = std::move(dloss);
                break;
            case Activation::SatLin:
                delta = (dloss.array() * satlin_mask(output)).matrix();
                break;
            case Activation::Softmax: {
                // row-wise Jacobian product: dz = o .* (da - (da . o))
                delta.resizeLike(dloss);
                for (Eigen::Index i = 0; i < dloss.rows(); ++i) {
                    const double inner = dloss.row(i).dot(output.row(i));
                    delta.row(i) =
                        (output.row(i).array() * (dloss.row(i).array() - inner)).matrix();
                }
                break;
            }
        }
    }

    Eigen::VectorXd grad(static_cast<Eigen::Index>(parameter_count(net)));
    Eigen::Index cursor = grad.size();
    for (std::size_t l = L; l-- > 0;) {
        const Eigen::MatrixXd& below = l == 0 ? batch.inputs : activations[l - 1];
        Eigen::MatrixXd grad_w = below.transpose() * delta;
        Eigen::VectorXd grad_b = delta.colwise().sum().transpose();

        cursor -= grad_b.size();
        grad.segment(cursor, grad_b.size()) = grad_b;
        cursor -= grad_w.size();
        for (Eigen::Index i = 0; i < grad_w.rows(); ++i)
            grad.segment(cursor + i * grad_w.cols(), grad_w.cols()) = grad_w.row(i);

        if (l > 0) {
            Eigen::MatrixXd dprev = delta * net.layers[l].weights.transpose();
            switch (net.layers[l - 1].activation) {
                case Activation::Linear:
                    delta = std::move(dprev);
                    break;
                case Activation::SatLin:
                    delta = (dprev.array() * satlin_mask(activations[l - 1])).matrix();
                    break;
                case Activation::Softmax:
                    throw std::invalid_argument("softmax is only valid as the final activation");
            }
        }
    }
    return grad;
}

std::size_t parameter_count(const Network& net) {
    std::size_t count = 0;
    for (const auto& layer : net.layers)
        count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    return count;
}

Eigen::VectorXd get_parameters(const Network& net) {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count(net)));
    Eigen::Index cursor = 0;
    for (const auto& layer : net.layers) {
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
            theta.segment(cursor, layer.weights.cols()) = layer.weights.row(i);
            cursor += layer.weights.cols();
        }
        theta.segment(cursor, layer.bias.size()) = layer.bias;
        cursor += layer.bias.size();
    }
    return theta;
}

void set_parameters(Network& net, const Eigen::VectorXd& theta) {
    if (theta.size() != static_cast<Eigen::Index>(parameter_count(net)))
        throw std::invalid_argument("parameter vector size " + std::to_string(theta.size()) +
                                    " does not match network parameter count " +
                                    std::to_string(parameter_count(net)));
    Eigen::Index cursor = 0;
    for (auto& layer : net.layers) {
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
            layer.weights.row(i) = theta.segment(cursor, layer.weights.cols());
            cursor += layer.weights.cols();
        }
        layer.bias = theta.segment(cursor, layer.bias.size());
        cursor += layer.bias.size();
    }
}

Eigen::MatrixXd glorot_matrix(int fan_in, int fan_out, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Eigen::MatrixXd w(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i)
        for (int j = 0; j < fan_out; ++j)
            w(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
    return w;
}

Eigen::VectorXd init_parameters(const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("need at least two layer dims");
    std::mt19937_64 rng(seed);
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l)
        total += static_cast<std::size_t>(dims[l]) * static_cast<std::size_t>(dims[l + 1]) +
                 static_cast<std::size_t>(dims[l + 1]);

    Eigen::VectorXd theta(static_cast<Eigen::Index>(total));
    Eigen::Index cursor = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (int i = 0; i < fan_in * fan_out; ++i)
            theta(cursor++) = (2.0 * uniform01(rng) - 1.0) * limit;
        for (int i = 0; i < fan_out; ++i) theta(cursor++) = 0.0;
    }
    return theta;
}

} // namespace nids
