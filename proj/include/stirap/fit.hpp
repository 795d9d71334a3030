#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace stirap {

/// Damped (Levenberg-Marquardt) weighted least squares on a residual vector.
/// Cost is sum r_i^2 and is strictly decreasing across accepted steps;
/// convergence when the relative cost change of an accepted step drops below
/// cost_rel_tol or max_iterations is reached.
struct LevMarOptions {
    int max_iterations = 200;
    double cost_rel_tol = 1e-10;
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double lambda_max = 1e14;
    double fd_step_rel = 1e-7;  // forward-difference Jacobian step
};

struct LevMarResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // (J^T J)^-1 at the optimum (sigma-weighted residuals)
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// residual_fn fills r (length n_residuals) for the given parameter vector.
/// Throws FitError with a residual report on non-convergence.
LevMarResult levmar_fit(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residual_fn,
    Eigen::VectorXd initial, int n_residuals, const LevMarOptions& options = {});

}  // namespace stirap
