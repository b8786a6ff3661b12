#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsps/jsa.hpp"
#include "hsps/purity.hpp"

namespace hsps {

struct PolingStructure {
    double domain_width = 0.0;          // m
    std::vector<std::int8_t> signs;     // +1 / -1 per domain, z ascending
    double period = 0.0;                // m, design period (metadata)
    double sigma = std::numeric_limits<double>::infinity();  // m, design target width (metadata)

    void validate() const;
    std::size_t domains() const { return signs.size(); }
    double length() const { return domain_width * static_cast<double>(signs.size()); }
};

/// Alternating +1, -1, ... with domain width period/2 and round(2L/period) domains.
PolingStructure periodic_structure(double length, double period);

/// exp(-(z - L/2)^2 / (2 sigma^2)) cos(2 pi z / period); sigma = inf gives the bare carrier.
double target_nonlinearity(double z, double length, double sigma, double period);

/// Running target amplitude at the grating wavevector:
/// (1/2L) sqrt(pi/2) sigma (erf((2z - L)/(2 sqrt2 sigma)) + erf(L/(2 sqrt2 sigma))).
double target_pmf(double z, double length, double sigma, double period);

/// (1/L) sum_n s_n integral over domain n of exp(-i dk z) dz, closed form.
std::complex<double> discrete_pmf(const PolingStructure& p, double delta_k);

/// Same sum restricted to the first `count` domains.
std::complex<double> partial_pmf(const PolingStructure& p, double delta_k, std::size_t count);

struct OptimizeReport {
    double scale = 0.0;            // factor applied to target_pmf before tracking
    double end_scale = 0.0;        // scale that maps target(L) onto the periodic amplitude
    double slope_scale = 0.0;      // scale at which the steepest target step equals one domain
    double max_deviation = 0.0;    // max |partial - scaled target| over domain boundaries
    double domain_increment = 0.0; // |contribution of one in-phase domain|
};

enum class TargetScaling {
    end_amplitude,  // target(L) equals the periodic structure's amplitude
    slope_feasible  // steepest target step equals one in-phase domain, capped by end_amplitude
};

/// Greedy domain-by-domain tracking of the scaled target amplitude at dk = 2 pi / period.
/// Ties go to +1. With end_amplitude scaling the centre of a Gaussian target rises
/// faster than one domain per step, so the partial sum lags there.
PolingStructure optimize_domains(double length, double period, double sigma,
                                 TargetScaling scaling = TargetScaling::end_amplitude,
                                 OptimizeReport* report = nullptr);

TargetScaling parse_target_scaling(const std::string& name);
std::string to_string(TargetScaling scaling);

struct PmfCurve {
    std::vector<double> delta_k;
    std::vector<std::complex<double>> values;
    double normalization = 1.0;  // peak |phi| of the periodic structure with the same length and period
};

PmfCurve pmf_curve(const PolingStructure& p, const std::vector<double>& delta_k);

/// Highest side lobe relative to the main peak of |phi|^2, in dB. The main lobe
/// is bounded by the first local minima on either side of the global maximum.
double side_lobe_level_db(const PmfCurve& curve);

using PmfProvider = std::function<std::complex<double>(double delta_k)>;

/// Pump envelope of the PMF-only amplitude, exp(-(wp - wp0)^2 / sigma_p^2).
double pump_envelope_alpha(const PumpSpec& pump, double omega_s, double omega_i);

/// Amplitude alpha * phi(dk(ws, wi)) on the grid; dk comes from the crystal's dispersion.
Eigen::MatrixXcd pmf_jsa(const CrystalSpec& spec, const PumpSpec& pump, const PmfProvider& pmf,
                         const FrequencyGrid& grid);

double purity_from_pmf(const CrystalSpec& spec, const PumpSpec& pump, const PmfProvider& pmf,
                       const FrequencyGrid& grid);

/// Grid wide enough for the pump band and the phase-matching main lobe:
/// half-width max(pump_span * pump FWHM, pmf_span * lobe), lobe = 2 pi c / (L |n'_s - n'_i|).
/// `n` is raised if needed so that one lobe spans at least `points_per_lobe` steps.
FrequencyGrid poling_grid(const CrystalSpec& spec, const PumpSpec& pump, std::size_t n = 256,
                          double pump_span = 3.0, double pmf_span = 6.0, double points_per_lobe = 4.0);

enum class StructureKind { periodic, optimized };

struct LandscapeOptions {
    std::size_t grid_points = 256;
    double sigma_fraction = 0.125;  // optimized target width as a fraction of L
    TargetScaling scaling = TargetScaling::end_amplitude;
};

struct Landscape {
    std::vector<double> pump_fwhm;  // m, rows
    std::vector<double> length;     // m, cols
    Eigen::MatrixXd purity;
    std::vector<std::string> cell_errors;  // row-major, empty when the cell succeeded
};

Landscape purity_landscape(const CrystalSpec& spec, const PumpSpec& pump, const std::vector<double>& pump_fwhm,
                           const std::vector<double>& lengths, StructureKind kind,
                           const LandscapeOptions& opt = {});

/// Header lines (domain width, count, period, sigma) then a run-length line:
/// each token is a run length, signed by the orientation of the run.
void write_structure(std::ostream& os, const PolingStructure& p);
PolingStructure read_structure(std::istream& is);

}  // namespace hsps
