#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsps {

struct MultiplexParams {
    double mu = 6e-3;
    double eta_herald = 0.31;
    double eta_sl = 0.067;
    int bins = 40;
    double pulse_period = 13e-9;  // s
    int dead_head = 5;
    int dead_tail = 5;
    bool final_bin = true;  // last bin of the train is always usable

    void validate() const;
};

/// Transmission and detector figures; the raw singles strings are kept verbatim.
struct ChannelEfficiencies {
    double eta_t = 0.80;
    double eta_di = 0.70;
    double eta_ds = 0.67;
    double eta_h = 0.338;
    double eta_v = 0.339;
    std::string singles_h_raw = "2,422 MHz";
    std::string singles_v_raw = "2,548 MHz";
    double singles_h_cps = 2.422e6;  // decimal-comma reading
    double singles_v_cps = 2.548e6;

    void validate() const;
    /// eta_mode * eta_t * eta_d for the detector of the heralded photon.
    double effective_herald(double eta_mode, double eta_detector) const { return eta_mode * eta_t * eta_detector; }
};

/// Thermal pair-number distribution mu^k / (mu + 1)^(k + 1).
double p_k(double mu, int k);

/// mu / (mu + 1)^2 * eta.
double heralded_single_prob(double mu, double eta_herald);

/// 1 - (1 - p)^N.
double p_heralded_basic(double p, int n);

/// sum_{k=1..N} P1 (1 - P1)^(N - k) (1 - eta_sl)^(N - k + 1), evaluated term by term.
double p_multiplexed_direct(double p1, double eta_sl, int n);

/// Closed geometric form of the same sum. Throws NumericError if it differs
/// from the direct sum by more than 1e-12.
double p_multiplexed(double p1, double eta_sl, int n);

/// Bins 1..N that may be stored: [h + 1, N - t_d], plus N when final_bin is set.
std::vector<int> allowed_bins(int n, int dead_head, int dead_tail, bool final_bin);

struct WorkZoneResult {
    double direct;       // sum over allowed bins, later heralds counted over allowed bins only
    double closed;       // closed form of `direct` for any h, t_d
    double printed;      // P1(1-e) + P1(1-P1)(1-e)^6 (q^(N-10) - 1)/(q - 1), independent of h, t_d
};

/// Throws DomainError when N <= h + t_d.
WorkZoneResult p_multiplexed_work_zone(double p1, double eta_sl, int n, int dead_head = 5, int dead_tail = 5,
                                       bool final_bin = true);

struct SimulationResult {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double p_hat = 0.0;
    double std_error = 0.0;  // binomial standard error
};

/// Monte Carlo of the storage scheme: the latest herald in an allowed bin is
/// stored and must survive N - k + 1 loop passes. Deterministic for a seed.
SimulationResult simulate_pulse_train(const MultiplexParams& params, std::uint64_t trials, std::uint64_t seed,
                                      bool parallel = true);

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> half_widths;  // 95% confidence; NaN when not identifiable
    std::vector<bool> fixed;
    double residual_norm = 0.0;
    int iterations = 0;
    int starts = 0;
    bool converged = false;
    bool identifiable = true;
    std::string message;

    double value(const std::string& name) const;
    double half_width(const std::string& name) const;
};

struct XyPoint {
    double x;
    double y;
    std::optional<double> sigma;
};

/// y = a (1 - eta_sl)^x: log-linear estimate, then nonlinear least squares.
FitResult fit_loop_loss(const std::vector<XyPoint>& data);

enum class MultiplexModel { plain, work_zone };

struct MultiplexFitOptions {
    MultiplexModel model = MultiplexModel::work_zone;
    int dead_head = 5;
    int dead_tail = 5;
    bool final_bin = true;
    std::optional<double> fix_mu;
    std::optional<double> fix_eta;
    std::optional<double> fix_eta_sl;
    double mu0 = 5e-3;
    double eta0 = 0.3;
    double eta_sl0 = 0.05;
    int starts = 16;
    std::uint64_t seed = 20240611;
};

/// Bounded least squares on the probabilities over the free subset of
/// (mu, eta, eta_sl); mu in (0, 1), the efficiencies in (0, 1).
FitResult fit_multiplexed(const std::vector<XyPoint>& data, const MultiplexFitOptions& opt = {});

/// Model value used by the fitter.
double multiplexed_model(double mu, double eta, double eta_sl, int n, const MultiplexFitOptions& opt);

}  // namespace hsps
