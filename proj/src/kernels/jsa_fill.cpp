#include "hsps/kernels/jsa_fill.hpp"

#include <exception>
#include <limits>
#include <string>

#include <omp.h>

#include "hsps/error.hpp"

namespace hsps::kernels {

namespace {

JsaFillOutput allocate(const FrequencyGrid& grid)
{
    const auto r = static_cast<Eigen::Index>(grid.rows());
    const auto c = static_cast<Eigen::Index>(grid.cols());
    JsaFillOutput out;
    out.psi.resize(r, c);
    out.a_plus.resize(r, c);
    out.b_plus.resize(r, c);
    out.c.resize(r, c);
    out.xi.resize(r, c);
    return out;
}

void fill_cell(const JsaFillInput& in, JsaFillOutput& out, Eigen::Index i, Eigen::Index j)
{
    const double ws = in.grid.omega_s[static_cast<std::size_t>(i)];
    const double wi = in.grid.omega_i[static_cast<std::size_t>(j)];
    const auto d = dimensionless_params(in.spec, in.geom, ws, wi);
    const auto pre = jsa_prefactor(in.spec, in.pump, d, ws, wi);
    out.psi(i, j) = pre.total() * overlap_kernel(d.phi, d.xi, d.c, in.kernel);
    out.a_plus(i, j) = d.a_plus;
    out.b_plus(i, j) = d.b_plus;
    out.c(i, j) = d.c;
    out.xi(i, j) = d.xi;
}

[[noreturn]] void rethrow_at(std::exception_ptr err, Eigen::Index i, Eigen::Index j)
{
    const std::string where = "grid cell (" + std::to_string(i) + ", " + std::to_string(j) + "): ";
    try {
        std::rethrow_exception(err);
    } catch (const NumericError& e) {
        throw NumericError(where + e.what(), e.residual());
    } catch (const DomainError& e) {
        throw DomainError(where + e.what());
    } catch (const SingularityError& e) {
        throw SingularityError(where + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    } catch (const std::exception& e) {
        throw NumericError(where + e.what());
    }
}

}  // namespace

JsaFillOutput jsa_fill_serial(const JsaFillInput& in)
{
    auto out = allocate(in.grid);
    for (Eigen::Index i = 0; i < out.psi.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.psi.cols(); ++j) {
            try {
                fill_cell(in, out, i, j);
            } catch (...) {
                rethrow_at(std::current_exception(), i, j);
            }
        }
    }
    return out;
}

JsaFillOutput jsa_fill_omp(const JsaFillInput& in)
{
    auto out = allocate(in.grid);
    const Eigen::Index rows = out.psi.rows();
    const Eigen::Index cols = out.psi.cols();
    const Eigen::Index total = rows * cols;

    // lowest failing linear index wins, so the reported cell matches the serial kernel
    Eigen::Index first_bad = std::numeric_limits<Eigen::Index>::max();
    std::exception_ptr first_err;

#pragma omp parallel for schedule(dynamic, 64)
    for (Eigen::Index n = 0; n < total; ++n) {
        const Eigen::Index i = n / cols;
        const Eigen::Index j = n % cols;
        try {
            fill_cell(in, out, i, j);
        } catch (...) {
#pragma omp critical(hsps_jsa_fill_error)
            {
                if (n < first_bad) {
                    first_bad = n;
                    first_err = std::current_exception();
                }
            }
        }
    }

    if (first_err) rethrow_at(first_err, first_bad / cols, first_bad % cols);
    return out;
}

}  // namespace hsps::kernels
