#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hsps/dispersion.hpp"

namespace hsps {

struct PumpSpec {
    double center_wavelength = 465e-9;  // m
    double fwhm = 12e-9;                // m, intensity FWHM
    double photon_number = 1.0;

    void validate() const;
    double omega0() const;
    /// Intensity FWHM in rad/s (linearized about the center).
    double fwhm_omega() const;
    /// Amplitude width of s(w) = exp(-(w - w0)^2 / (4 sigma^2)).
    double sigma_omega() const;
};

/// Gaussian pump envelope in the sum frequency, 1 at the pump center.
double pump_amplitude(const PumpSpec& pump, double omega_s, double omega_i);

/// Integral of |s|^2 over the pump frequency, sqrt(2 pi) sigma.
double pump_spectral_measure(const PumpSpec& pump);

/// Beam confinement, stored either as waists or as focal parameters.
/// The conversion xi = L / (k w^2) is done only by focal_parameters().
class BeamGeometry {
public:
    enum class Kind { waists, focal };

    static BeamGeometry from_waists(double w_p, double w_s, double w_i);
    static BeamGeometry from_focal(double xi_p, double xi_s, double xi_i);

    Kind kind() const { return kind_; }
    const std::array<double, 3>& values() const { return values_; }

    /// (xi_p, xi_s, xi_i) at the given frequencies.
    std::array<double, 3> focal_parameters(const CrystalSpec& spec, double omega_s, double omega_i) const;
    /// (w_p, w_s, w_i) at the given frequencies.
    std::array<double, 3> waists(const CrystalSpec& spec, double omega_s, double omega_i) const;

private:
    BeamGeometry(Kind kind, std::array<double, 3> values);
    Kind kind_;
    std::array<double, 3> values_;  // pump, signal, idler
};

/// sqrt(L / k), the waist that gives xi = 1.
double optimal_waist(const CrystalSpec& spec, Polarization pol, double omega);

struct FrequencyGrid {
    std::vector<double> omega_s;
    std::vector<double> omega_i;

    static FrequencyGrid uniform(double center_s, double center_i, double half_width_s,
                                 double half_width_i, std::size_t n_s, std::size_t n_i);
    void validate() const;
    std::size_t rows() const { return omega_s.size(); }
    std::size_t cols() const { return omega_i.size(); }
    /// Inserts the midpoint between neighbours; node j of this grid is node 2j of the result.
    FrequencyGrid refined() const;
};

/// Square grid centred on the phase-matched pair at the pump centre,
/// half-width span_fwhm pump intensity FWHMs on both axes.
FrequencyGrid default_grid(const CrystalSpec& spec, const PumpSpec& pump, std::size_t n = 512,
                           double span_fwhm = 3.0);

struct DimensionlessParams {
    double a_plus;
    double b_plus;
    double c;
    double xi;
    double delta_k;
    double phi;
};

DimensionlessParams dimensionless_params(const CrystalSpec& spec, const BeamGeometry& geom,
                                         double omega_s, double omega_i);

struct KernelOptions {
    double rel_tol = 1e-8;
    int max_panels = 4096;
};

/// Integral over l in [-1, 1] of sqrt(xi) exp(i phi l / 2) / (1 - i xi l - C xi^2 l^2).
/// Composite Gauss-Legendre, each panel checked 64 against 128 points; the
/// panel count doubles until the check passes. Throws NumericError otherwise.
std::complex<double> overlap_kernel(double phi, double xi, double c, const KernelOptions& opt = {});

struct PrefactorBreakdown {
    double amplitude;       // sqrt(8 pi^2 eps hbar n_s n_i N_p L / (eps0 n_p))
    double nonlinearity;    // chi / (lambda_s lambda_i)
    double geometric;       // 1 / sqrt(A+ B+)
    double pump_envelope;   // s(w_p)
    double total() const { return amplitude * nonlinearity * geometric * pump_envelope; }
};

PrefactorBreakdown jsa_prefactor(const CrystalSpec& spec, const PumpSpec& pump,
                                 const DimensionlessParams& d, double omega_s, double omega_i);

/// Single-point amplitude.
std::complex<double> jsa_point(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                               double omega_s, double omega_i, const KernelOptions& opt = {});

struct JsaDiagnostics {
    double max_abs_c = 0.0;
    double spread_a_plus = 0.0;
    double spread_b_plus = 0.0;
    double spread_xi = 0.0;
    double central_a_plus = 0.0;
    double central_b_plus = 0.0;
    double central_xi = 0.0;
    std::size_t support_points = 0;
};

struct JsaResult {
    FrequencyGrid grid;
    Eigen::MatrixXcd psi;  // rows: omega_s, cols: omega_i
    JsaDiagnostics diagnostics;
};

struct JsaOptions {
    bool parallel = true;
    KernelOptions kernel;
    double support_fraction = 0.01;
};

JsaResult compute_jsa(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                      const FrequencyGrid& grid, const JsaOptions& opt = {});

struct ApproximationReport {
    bool valid = false;
    double max_abs_c = 0.0;
    double spread_a_plus = 0.0;
    double spread_b_plus = 0.0;
    double spread_xi = 0.0;
    double c_threshold = 0.1;
    double spread_threshold = 0.1;
};

ApproximationReport approximation_report(const JsaResult& result, double c_threshold = 0.1,
                                         double spread_threshold = 0.1);

}  // namespace hsps
