#pragma once

#include <cstdint>
#include <vector>

namespace hsps::kernels {

struct PulseTrainInput {
    double p1;                       // herald probability per bin
    std::vector<double> survival;    // per allowed bin, probability the stored photon survives
    std::uint64_t trials;
    std::uint64_t seed;
};

/// Allowed bins are listed latest first; survival[j] belongs to the j-th of them.
/// Trial t draws from Philox stream t only.
std::uint64_t pulse_train_serial(const PulseTrainInput& in);
std::uint64_t pulse_train_omp(const PulseTrainInput& in);

}  // namespace hsps::kernels
