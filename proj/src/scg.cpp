#include "nids/scg.hpp"

#include "nids/errors.hpp"

#include <cmath>
#include <string>

namespace nids {

namespace {

constexpr double kLambdaCeiling = 1e100; // damping beyond this cannot make progress
constexpr double kGradientFloor = 1e-12; // steepest-descent norm treated as stationary

double checked_loss(const ScgObjective& obj, const Eigen::VectorXd& theta, int iteration) {
    const double f = obj.loss(theta);
    if (!std::isfinite(f))
        throw TrainingError("non-finite loss at iteration " + std::to_string(iteration),
                            iteration);
    return f;
}

Eigen::VectorXd checked_gradient(const ScgObjective& obj, const Eigen::VectorXd& theta,
                                 int iteration) {
    Eigen::VectorXd g = obj.gradient(theta);
    if (!g.allFinite())
        throw TrainingError("non-finite gradient at iteration " + std::to_string(iteration),
                            iteration);
    return g;
}

} // namespace

ScgResult scg_minimize(const ScgObjective& objective, const Eigen::VectorXd& theta0,
                       const TrainConfig& cfg) {
    ScgState st;
    st.theta = theta0;

    double f = checked_loss(objective, st.theta, 0);
    Eigen::VectorXd grad = checked_gradient(objective, st.theta, 0);
    Eigen::VectorXd residual = -grad;       // r_k
    st.direction = residual;                // p_k

    ScgResult result;
    result.trace.push_back(f);
    result.parameters = st.theta;
    result.final_loss = f;

    const auto n = static_cast<int>(theta0.size());
    double best_loss = f;
    Eigen::VectorXd best_theta = st.theta;
    double curvature = 0.0; // p' * s, kept across unsuccessful steps
    double direction_norm2 = 0.0;
    int saturated_steps = 0;

    for (st.iteration = 1; st.iteration <= cfg.max_iterations; ++st.iteration) {
        if (st.success) {
            direction_norm2 = st.direction.squaredNorm();
            if (std::sqrt(direction_norm2) < kGradientFloor) {
                result.converged = true;
                break;
            }
            // second-order information from a sigma-scaled gradient difference
            const double sigma_k = st.sigma / std::sqrt(direction_norm2);
            const Eigen::VectorXd grad_plus =
                checked_gradient(objective, st.theta + sigma_k * st.direction, st.iteration);
            curvature = st.direction.dot(grad_plus - grad) / sigma_k;
        }

        double delta = curvature + (st.lambda - st.lambda_bar) * direction_norm2;
        if (delta <= 0.0) {
            // make the scaled Hessian approximation positive definite
            st.lambda_bar = 2.0 * (st.lambda - delta / direction_norm2);
            delta = -delta + st.lambda * direction_norm2;
            st.lambda = st.lambda_bar;
        }

        const double mu = st.direction.dot(residual);
        if (mu == 0.0) {
            // direction orthogonal to the gradient: no progress possible along it
            result.trace.push_back(f);
            break;
        }
        const double alpha = mu / delta;
        const Eigen::VectorXd theta_new = st.theta + alpha * st.direction;
        const double f_new = checked_loss(objective, theta_new, st.iteration);

        // quadratic-fit quality of the predicted reduction
        const double comparison = 2.0 * delta * (f - f_new) / (mu * mu);

        if (comparison >= 0.0) {
            const double f_prev = f;
            st.theta = theta_new;
            f = f_new;
            grad = checked_gradient(objective, st.theta, st.iteration);
            Eigen::VectorXd residual_new = -grad;
            st.lambda_bar = 0.0;
            st.success = true;

            if (st.iteration % n == 0) {
                st.direction = residual_new; // periodic restart to steepest descent
            } else {
                const double beta =
                    (residual_new.squaredNorm() - residual_new.dot(residual)) / mu;
                st.direction = residual_new + beta * st.direction;
            }
            residual = std::move(residual_new);
            if (comparison >= 0.75) st.lambda *= 0.25;

            if (f < best_loss) {
                best_loss = f;
                best_theta = st.theta;
            }
            const double rel_decrease = (f_prev - f) / std::max(std::abs(f_prev), 1e-300);
            if (rel_decrease < cfg.tolerance) {
                if (++saturated_steps >= cfg.patience) {
                    result.trace.push_back(f);
                    result.converged = true;
                    break;
                }
            } else {
                saturated_steps = 0;
            }
        } else {
            st.lambda_bar = st.lambda;
            st.success = false;
        }

        if (comparison < 0.25)
            st.lambda += delta * (1.0 - comparison) / direction_norm2;
        if (st.lambda > kLambdaCeiling) {
            result.trace.push_back(f);
            break;
        }

        result.trace.push_back(f);
    }

    result.parameters = best_theta;
    result.final_loss = best_loss;
    result.iterations = std::min(st.iteration, cfg.max_iterations);
    return result;
}

} // namespace nids
