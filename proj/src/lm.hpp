#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hsps::detail {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LmOptions {
    int max_iterations = 500;
    double ftol = 1e-15;   // relative decrease of the sum of squares
    double xtol = 1e-14;   // relative step size
};

struct LmResult {
    Eigen::VectorXd x;
    double ssr = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Central-difference Jacobian of `f` at `x`.
Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& x);

/// Levenberg-Marquardt with Marquardt's diagonal scaling.
LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x, const LmOptions& opt = {});

struct Covariance {
    Eigen::VectorXd half_widths;  // NaN where undetermined
    bool identifiable = true;
};

/// 95% half-widths t_{0.975, dof} sqrt(diag(s^2 (J^T J)^-1)), s^2 = ssr / dof.
Covariance confidence(const Eigen::MatrixXd& j, double ssr, int dof);

}  // namespace hsps::detail
