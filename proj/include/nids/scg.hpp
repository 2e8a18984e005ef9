#pragma once

#include "nids/neuralnet.hpp"

#include <functional>
#include <vector>

namespace nids {

// Objective callbacks over a flat parameter vector.
struct ScgObjective {
    std::function<double(const Eigen::VectorXd&)> loss;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

// Moller's scaled-conjugate-gradient iteration state.
struct ScgState {
    Eigen::VectorXd theta;
    Eigen::VectorXd direction;
    double sigma = 5e-5;      // perturbation steepness for curvature probes
    double lambda = 5e-7;     // trust-region regulator
    double lambda_bar = 0.0;
    bool success = true;
    int iteration = 0;
};

struct ScgResult {
    Eigen::VectorXd parameters; // best seen
    std::vector<double> trace;  // initial loss, then loss after every iteration
    int iterations = 0;
    bool converged = false;
    double final_loss = 0.0;
};

/// Full-batch SCG minimization: second-order step sizes from sigma-perturbed
/// gradient differences, lambda trust-region adaptation, restart to steepest
/// descent every |theta| iterations. The trace never increases on successful
/// steps. Throws TrainingError with the iteration index on non-finite loss
/// or gradient values.
ScgResult scg_minimize(const ScgObjective& objective,
                       const Eigen::VectorXd& theta0,
                       const TrainConfig& cfg);

} // namespace nids
