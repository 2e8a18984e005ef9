#include "nids/neuralnet.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace nids;
using testutil::finite_difference_gradient;
using testutil::random_matrix;
using testutil::random_network;
using testutil::relative_error;

namespace {

Network single_layer(const Eigen::MatrixXd& w, Activation act, LossKind loss) {
    Network net;
    net.loss = loss;
    net.layers.push_back(DenseLayer{w, Eigen::VectorXd::Zero(w.cols()), act});
    return net;
}

Eigen::MatrixXd one_hot_rows(const std::vector<int>& labels, int classes) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), classes);
    for (std::size_t i = 0; i < labels.size(); ++i) t(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    return t;
}

} // namespace

TEST_CASE("validate rejects inconsistent networks") {
    Network net = single_layer(Eigen::MatrixXd::Identity(3, 3), Activation::Linear,
                               LossKind::MeanSquaredError);
    CHECK_NOTHROW(validate(net));

    SUBCASE("dimension chain break") {
        net.layers.push_back(DenseLayer{Eigen::MatrixXd::Zero(4, 2),
                                        Eigen::VectorXd::Zero(2), Activation::Linear});
        CHECK_THROWS_AS(validate(net), std::invalid_argument);
    }
    SUBCASE("softmax before the last layer") {
        net.layers[0].activation = Activation::Softmax;
        net.layers.push_back(DenseLayer{Eigen::MatrixXd::Zero(3, 2),
                                        Eigen::VectorXd::Zero(2), Activation::Linear});
        CHECK_THROWS_AS(validate(net), std::invalid_argument);
    }
    SUBCASE("cross-entropy without softmax") {
        net.loss = LossKind::CrossEntropy;
        CHECK_THROWS_AS(validate(net), std::invalid_argument);
    }
}

TEST_CASE("forward") {
    SUBCASE("identity linear layer reproduces the input") {
        const Network net = single_layer(Eigen::MatrixXd::Identity(4, 4), Activation::Linear,
                                         LossKind::MeanSquaredError);
        const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);
        CHECK((forward_one(net, x) - x).norm() == 0.0);
    }
    SUBCASE("satlin clamps (-0.5, 0.5, 1.5) to (0, 0.5, 1)") {
        Eigen::MatrixXd z(1, 3);
        z << -0.5, 0.5, 1.5;
        const Eigen::MatrixXd a = apply_activation(Activation::SatLin, z);
        CHECK(a(0, 0) == 0.0);
        CHECK(a(0, 1) == 0.5);
        CHECK(a(0, 2) == 1.0);
    }
    SUBCASE("softmax of zeros is uniform") {
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 4);
        const Eigen::MatrixXd a = apply_activation(Activation::Softmax, z);
        for (int j = 0; j < 4; ++j) CHECK(a(0, j) == doctest::Approx(0.25));
    }
    SUBCASE("dimension mismatch throws") {
        const Network net = single_layer(Eigen::MatrixXd::Identity(4, 4), Activation::Linear,
                                         LossKind::MeanSquaredError);
        CHECK_THROWS_AS(forward(net, Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
    }
}

TEST_CASE("satlin output always lies in [0,1]") {
    const Eigen::MatrixXd z = random_matrix(20, 7, 3, -10.0, 10.0);
    const Eigen::MatrixXd a = apply_activation(Activation::SatLin, z);
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 1.0);
}

TEST_CASE("softmax rows are positive and sum to 1 within 1e-9") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const Eigen::MatrixXd z = random_matrix(50, 6, seed, -30.0, 30.0);
        const Eigen::MatrixXd a = apply_activation(Activation::Softmax, z);
        CHECK(a.minCoeff() > 0.0);
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            CHECK(std::abs(a.row(i).sum() - 1.0) <= 1e-9);
    }
}

TEST_CASE("loss") {
    SUBCASE("perfect reconstruction -> MSE 0") {
        const Network net = single_layer(Eigen::MatrixXd::Identity(3, 3), Activation::Linear,
                                         LossKind::MeanSquaredError);
        const Eigen::MatrixXd x = random_matrix(5, 3, 9);
        CHECK(loss(net, Batch{x, x}) == 0.0);
    }
    SUBCASE("one sample, x=(1,0), xhat=(0,0) -> MSE 0.5") {
        const Network net = single_layer(Eigen::MatrixXd::Zero(2, 2), Activation::Linear,
                                         LossKind::MeanSquaredError);
        Eigen::MatrixXd x(1, 2);
        x << 1.0, 0.0;
        CHECK(loss(net, Batch{x, x}) == doctest::Approx(0.5));
    }
    SUBCASE("saturated softmax on the true class -> cross-entropy ~ 0") {
        // logits (1000, 0, 0, 0) drive softmax to a numerically exact one-hot
        Network net = single_layer(Eigen::MatrixXd::Identity(4, 4), Activation::Softmax,
                                   LossKind::CrossEntropy);
        Eigen::MatrixXd x(1, 4);
        x << 1000.0, 0.0, 0.0, 0.0;
        const Eigen::MatrixXd t = one_hot_rows({0}, 4);
        CHECK(loss(net, Batch{x, t}) == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("cross-entropy rejects non-one-hot targets") {
        Network net = single_layer(Eigen::MatrixXd::Identity(4, 4), Activation::Softmax,
                                   LossKind::CrossEntropy);
        Eigen::MatrixXd x = random_matrix(2, 4, 5);
        Eigen::MatrixXd t = one_hot_rows({0, 1}, 4);
        t(0, 2) = 0.5;
        CHECK_THROWS_AS(loss(net, Batch{x, t}), std::invalid_argument);
    }
}

TEST_CASE("gradient is zero at an exact minimum") {
    const Network net = single_layer(Eigen::MatrixXd::Identity(3, 3), Activation::Linear,
                                     LossKind::MeanSquaredError);
    const Eigen::MatrixXd x = random_matrix(4, 3, 2);
    const Eigen::VectorXd g = gradient(net, Batch{x, x});
    CHECK(g.norm() == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
    struct Case {
        std::vector<int> dims;
        std::vector<Activation> acts;
        LossKind loss;
        bool one_hot_targets;
    };
    const std::vector<Case> cases = {
        {{5, 3}, {Activation::Linear}, LossKind::MeanSquaredError, false},
        {{5, 4}, {Activation::SatLin}, LossKind::MeanSquaredError, false},
        {{5, 4}, {Activation::Softmax}, LossKind::MeanSquaredError, false},
        {{5, 4}, {Activation::Softmax}, LossKind::CrossEntropy, true},
        {{6, 4, 3}, {Activation::SatLin, Activation::Linear}, LossKind::MeanSquaredError, false},
        {{6, 4, 4}, {Activation::SatLin, Activation::Softmax}, LossKind::CrossEntropy, true},
        {{7, 5, 4, 4},
         {Activation::SatLin, Activation::SatLin, Activation::Softmax},
         LossKind::CrossEntropy,
         true},
    };

    for (std::size_t c = 0; c < cases.size(); ++c) {
        const auto& tc = cases[c];
        for (std::uint64_t seed : {11, 17}) {
            Network net = random_network(tc.dims, tc.acts, tc.loss, seed);
            // keep pre-activations inside satlin's linear band
            for (auto& layer : net.layers) layer.weights *= 0.35;

            Batch batch;
            batch.inputs = random_matrix(6, tc.dims.front(), seed + 100, 0.05, 0.95);
            const int out_dim = tc.dims.back();
            if (tc.one_hot_targets) {
                std::vector<int> labels;
                for (int i = 0; i < 6; ++i) labels.push_back(i % out_dim);
                batch.targets = one_hot_rows(labels, out_dim);
            } else {
                batch.targets = random_matrix(6, out_dim, seed + 200, 0.1, 0.9);
            }

            const Eigen::VectorXd analytic = gradient(net, batch);
            const Eigen::VectorXd numeric = finite_difference_gradient(
                [&](const Eigen::VectorXd& theta) {
                    Network probe = net;
                    set_parameters(probe, theta);
                    return loss(probe, batch);
                },
                get_parameters(net));
            CAPTURE(c);
            CAPTURE(seed);
            CHECK(relative_error(analytic, numeric) < 1e-5);
        }
    }
}

TEST_CASE("softmax+cross-entropy output delta equals o - t") {
    Network net = random_network({5, 4}, {Activation::Softmax}, LossKind::CrossEntropy, 23);
    Batch batch;
    batch.inputs = random_matrix(1, 5, 31, 0.0, 1.0);
    batch.targets = one_hot_rows({2}, 4);

    const Eigen::VectorXd o = forward(net, batch.inputs).back().row(0).transpose();
    const Eigen::VectorXd expected_bias_grad = o - batch.targets.row(0).transpose();

    // bias gradient of the output layer is exactly the per-sample delta
    const Eigen::VectorXd g = gradient(net, batch);
    const Eigen::VectorXd bias_grad = g.tail(4);
    CHECK((bias_grad - expected_bias_grad).norm() < 1e-12);
}

TEST_CASE("parameter round trip") {
    Network net = random_network({6, 5, 4}, {Activation::SatLin, Activation::Softmax},
                                 LossKind::CrossEntropy, 5);
    const Eigen::VectorXd theta = get_parameters(net);
    Network other = net;
    for (auto& layer : other.layers) {
        layer.weights.setZero();
        layer.bias.setZero();
    }
    set_parameters(other, theta);
    CHECK((get_parameters(other) - theta).norm() == 0.0);
    CHECK_THROWS_AS(set_parameters(other, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("init_parameters") {
    const std::vector<int> dims = {7, 4, 3};

    SUBCASE("same seed -> identical vectors; different seeds differ") {
        const Eigen::VectorXd a = init_parameters(dims, 42);
        const Eigen::VectorXd b = init_parameters(dims, 42);
        const Eigen::VectorXd c = init_parameters(dims, 43);
        CHECK((a - b).norm() == 0.0);
        CHECK((a - c).norm() > 0.0);
    }
    SUBCASE("biases are zero and weights respect the Glorot bound") {
        const Eigen::VectorXd theta = init_parameters(dims, 7);
        Network net;
        net.layers.push_back(DenseLayer{Eigen::MatrixXd::Zero(7, 4),
                                        Eigen::VectorXd::Zero(4), Activation::SatLin});
        net.layers.push_back(DenseLayer{Eigen::MatrixXd::Zero(4, 3),
                                        Eigen::VectorXd::Zero(3), Activation::Linear});
        set_parameters(net, theta);
        CHECK(net.layers[0].bias.cwiseAbs().maxCoeff() == 0.0);
        CHECK(net.layers[1].bias.cwiseAbs().maxCoeff() == 0.0);
        CHECK(net.layers[0].weights.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 11.0));
        CHECK(net.layers[1].weights.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 7.0));
        CHECK(net.layers[0].weights.cwiseAbs().maxCoeff() > 0.0);
    }
}
