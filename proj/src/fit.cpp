#include "stirap/fit.hpp"

#include <cmath>
#include <sstream>

namespace stirap {

namespace {

void numerical_jacobian(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residual_fn,
    const Eigen::VectorXd& params, const Eigen::VectorXd& residuals, double fd_step_rel,
    Eigen::MatrixXd& jacobian) {
    Eigen::VectorXd probe = params;
    Eigen::VectorXd shifted(residuals.size());
    for (int j = 0; j < params.size(); ++j) {
        const double step = fd_step_rel * std::max(std::abs(params[j]), 1.0);
        probe[j] = params[j] + step;
        residual_fn(probe, shifted);
        jacobian.col(j) = (shifted - residuals) / step;
        probe[j] = params[j];
    }
}

}  // namespace

LevMarResult levmar_fit(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residual_fn,
    Eigen::VectorXd initial, int n_residuals, const LevMarOptions& options) {
    const int n_params = static_cast<int>(initial.size());
    if (n_params < 1) throw FitError("fit needs at least one parameter");
    if (n_residuals < n_params) throw FitError("fewer residuals than parameters");

    Eigen::VectorXd params = std::move(initial);
    Eigen::VectorXd residuals(n_residuals);
    residual_fn(params, residuals);
    double cost = residuals.squaredNorm();
    if (!std::isfinite(cost)) throw FitError("initial parameters give non-finite residuals");

    Eigen::MatrixXd jacobian(n_residuals, n_params);
    double lambda = options.lambda_init;
    bool converged = cost == 0.0;
    int iteration = 0;

    while (!converged && iteration < options.max_iterations) {
        ++iteration;
        numerical_jacobian(residual_fn, params, residuals, options.fd_step_rel, jacobian);
        const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
        const Eigen::VectorXd gradient = jacobian.transpose() * residuals;

        bool accepted = false;
        while (!accepted && lambda <= options.lambda_max) {
            Eigen::MatrixXd damped = jtj;
            for (int j = 0; j < n_params; ++j) {
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
            }
            const Eigen::VectorXd delta = damped.ldlt().solve(-gradient);
            const Eigen::VectorXd trial = params + delta;
            Eigen::VectorXd trial_residuals(n_residuals);
            residual_fn(trial, trial_residuals);
            const double trial_cost = trial_residuals.squaredNorm();

            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double rel_drop = (cost - trial_cost) / std::max(cost, 1e-300);
                params = trial;
                residuals = trial_residuals;
                cost = trial_cost;
                lambda = std::max(lambda * options.lambda_down, 1e-12);
                accepted = true;
                if (rel_drop < options.cost_rel_tol || cost == 0.0) converged = true;
            } else {
                lambda *= options.lambda_up;
            }
        }
        if (!accepted) {
            // Damping exhausted: no downhill direction left at this scale.
            converged = true;
        }
    }

    if (!converged) {
        std::ostringstream report;
        report << "fit did not converge after " << options.max_iterations
               << " iterations; cost = " << cost
               << ", max |residual| = " << residuals.cwiseAbs().maxCoeff();
        throw FitError(report.str());
    }

    numerical_jacobian(residual_fn, params, residuals, options.fd_step_rel, jacobian);
    const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    Eigen::MatrixXd covariance = Eigen::MatrixXd::Zero(n_params, n_params);
    const auto qr = jtj.fullPivHouseholderQr();
    if (qr.isInvertible()) covariance = qr.inverse();

    LevMarResult result;
    result.params = std::move(params);
    result.covariance = std::move(covariance);
    result.cost = cost;
    result.iterations = iteration;
    result.converged = true;
    return result;
}

}  // namespace stirap
