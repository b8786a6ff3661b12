#include "lm.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

namespace hsps::detail {

Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& x)
{
    const Eigen::VectorXd r0 = f(x);
    Eigen::MatrixXd j(r0.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        j.col(k) = (f(xp) - f(xm)) / (xp(k) - xm(k));
    }
    return j;
}

LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x, const LmOptions& opt)
{
    LmResult res;
    Eigen::VectorXd r = f(x);
    double ssr = r.squaredNorm();
    double lambda = 1e-3;

    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it + 1;
        if (!std::isfinite(ssr)) break;
        if (ssr == 0.0) {
            res.converged = true;
            break;
        }
        const Eigen::MatrixXd j = jacobian(f, x);
        const Eigen::MatrixXd a = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;
        if (g.cwiseAbs().maxCoeff() <= 1e-300) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            Eigen::MatrixXd damped = a;
            for (Eigen::Index k = 0; k < a.rows(); ++k) damped(k, k) += lambda * std::max(a(k, k), 1e-300);
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd xn = x + step;
            const Eigen::VectorXd rn = f(xn);
            const double sn = rn.squaredNorm();
            if (std::isfinite(sn) && sn < ssr) {
                const double decrease = (ssr - sn) / ssr;
                const double step_size = step.norm() / (x.norm() + opt.xtol);
                x = xn;
                r = rn;
                ssr = sn;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (decrease < opt.ftol || step_size < opt.xtol) res.converged = true;
            } else {
                lambda *= 4.0;
            }
        }
        if (!accepted) {
            // no downhill step at any damping: x is a stationary point to working precision
            res.converged = true;
            break;
        }
        if (res.converged) break;
    }
    res.x = x;
    res.ssr = ssr;
    return res;
}

Covariance confidence(const Eigen::MatrixXd& j, double ssr, int dof)
{
    const auto p = j.cols();
    Covariance c;
    c.half_widths = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    const Eigen::MatrixXd a = j.transpose() * j;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0.0) || sv(sv.size() - 1) < 1e-12 * sv(0)) {
        c.identifiable = false;
        return c;
    }
    if (dof <= 0) return c;
    const Eigen::MatrixXd cov = a.inverse() * (ssr / dof);
    const boost::math::students_t dist(static_cast<double>(dof));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    for (Eigen::Index k = 0; k < p; ++k) c.half_widths(k) = t * std::sqrt(std::max(cov(k, k), 0.0));
    return c;
}

}  // namespace hsps::detail
