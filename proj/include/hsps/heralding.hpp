#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hsps/jsa.hpp"

namespace hsps {

enum class Channel { signal, idler };

/// Everything the closed-form collection probabilities need at one frequency pair.
struct HeraldingTerms {
    DimensionlessParams params;
    double xi_p, xi_s, xi_i;
    double a_s, b_s, a_i, b_i;
    double group_index_s, group_index_i;
    double scale;  // 64 pi^3 hbar c eps n_s n_i chi^2 N_p / (eps0 n_p (lambda_s lambda_i)^2), no group-index factor
};

HeraldingTerms heralding_terms(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                               double omega_s, double omega_i);

/// Pair collection probability in the separable approximation.
/// Throws SingularityError when |n'_s - n'_i| < 1e-6.
double pair_probability(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                        double omega_s, double omega_i);

/// Single-photon collection probability of one channel.
double single_probability(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                          double omega_s, double omega_i, Channel channel);

struct HeraldingPoint {
    double eta_s = 0.0;
    double eta_i = 0.0;
    double eta_c = 0.0;
    double omega_s = 0.0;
    double omega_i = 0.0;
    double xi_p = 0.0;
    double xi_s = 0.0;
    double xi_i = 0.0;
};

/// eta_s = atan(xi) A_s B_s / (A+ B+ atan(B_s xi_s / A_s)), likewise for the idler;
/// eta_c = sqrt(A_s A_i B_s B_i) atan(xi) / (A+ B+ sqrt(atan(..s) atan(..i))).
/// These are ratios, so the group-index singularity cancels and is not checked.
HeraldingPoint heralding_point(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                               double omega_s, double omega_i);

double heralding_efficiency(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                            double omega_s, double omega_i, Channel channel);

struct SweepError {
    std::size_t index;
    std::string message;
};

struct HeraldingSweep {
    std::vector<HeraldingPoint> rows;
    std::vector<bool> ok;             // false where the point failed; its row is zero-filled
    std::vector<SweepError> errors;
    std::optional<std::size_t> argmax;  // row with the largest eta_c
    std::string note;                   // what was held fixed
};

/// Signal wavelength scan with the idler fixed by energy conservation at the pump centre.
/// The beam geometry is kept as given: waists stay fixed and xi follows k(omega).
HeraldingSweep sweep_heralding_wavelength(const CrystalSpec& spec, const PumpSpec& pump,
                                          const BeamGeometry& geom, double lambda_s_min,
                                          double lambda_s_max, std::size_t n);

enum class FocalMode {
    symmetric,  // xi_s = xi_i, both taken from xi_s_values
    full        // independent xi_s, xi_i
};

/// Focal-parameter scan at a fixed frequency pair. Rows are ordered with
/// xi_p slowest and xi_i fastest.
HeraldingSweep sweep_heralding_focal(const CrystalSpec& spec, const PumpSpec& pump, double omega_s,
                                     double omega_i, const std::vector<double>& xi_p_values,
                                     const std::vector<double>& xi_s_values,
                                     const std::vector<double>& xi_i_values, FocalMode mode);

struct FocalJsiRow {
    double xi_p, xi_s, xi_i;
    double max_jsi;
    double omega_s, omega_i;  // location of the maximum
};

struct FocalJsiTable {
    std::vector<FocalJsiRow> rows;
    std::vector<bool> ok;
    std::vector<SweepError> errors;
    std::optional<std::size_t> argmax;
};

enum class FocalTriples {
    constrained,  // xi_p = xi_s = xi_i
    full          // tensor product of the value list with itself
};

/// For each focal triple, the peak of |psi|^2: located on the grid, then
/// polished by a local compass search in (omega_s, omega_i).
FocalJsiTable max_jsi_over_focal(const CrystalSpec& spec, const PumpSpec& pump,
                                 const std::vector<double>& xi_values, const FrequencyGrid& grid,
                                 FocalTriples triples = FocalTriples::constrained);

/// Grid used by max_jsi_over_focal by default: n x n over +-span pump FWHMs.
FrequencyGrid focal_scan_grid(const CrystalSpec& spec, const PumpSpec& pump, std::size_t n = 96,
                              double span_fwhm = 1.0);

}  // namespace hsps
