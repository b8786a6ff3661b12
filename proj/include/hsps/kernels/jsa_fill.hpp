#pragma once

#include <Eigen/Dense>

#include "hsps/jsa.hpp"

namespace hsps::kernels {

struct JsaFillInput {
    const CrystalSpec& spec;
    const PumpSpec& pump;
    const BeamGeometry& geom;
    const FrequencyGrid& grid;
    KernelOptions kernel;
};

struct JsaFillOutput {
    Eigen::MatrixXcd psi;
    Eigen::MatrixXd a_plus;
    Eigen::MatrixXd b_plus;
    Eigen::MatrixXd c;
    Eigen::MatrixXd xi;
};

/// Reference implementation, row-major loop on one thread.
JsaFillOutput jsa_fill_serial(const JsaFillInput& in);

/// OpenMP version. Cells are written disjointly, so the output is bitwise
/// equal to the serial one for any thread count.
JsaFillOutput jsa_fill_omp(const JsaFillInput& in);

}  // namespace hsps::kernels
