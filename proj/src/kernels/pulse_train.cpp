#include "hsps/kernels/pulse_train.hpp"

#include <cstddef>

#include "hsps/rng.hpp"

namespace hsps::kernels {

namespace {

bool run_trial(const PulseTrainInput& in, std::uint64_t trial)
{
    PhiloxStream rng(in.seed, trial);
    for (std::size_t j = 0; j < in.survival.size(); ++j) {
        if (rng.uniform() < in.p1) return rng.uniform() < in.survival[j];
    }
    return false;
}

}  // namespace

std::uint64_t pulse_train_serial(const PulseTrainInput& in)
{
    std::uint64_t successes = 0;
    for (std::uint64_t t = 0; t < in.trials; ++t) successes += run_trial(in, t) ? 1 : 0;
    return successes;
}

std::uint64_t pulse_train_omp(const PulseTrainInput& in)
{
    std::uint64_t successes = 0;
    const auto n = static_cast<std::int64_t>(in.trials);
#pragma omp parallel for schedule(static) reduction(+ : successes)
    for (std::int64_t t = 0; t < n; ++t) successes += run_trial(in, static_cast<std::uint64_t>(t)) ? 1 : 0;
    return successes;
}

}  // namespace hsps::kernels
