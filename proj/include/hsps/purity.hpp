#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsps/heralding.hpp"
#include "hsps/jsa.hpp"

namespace hsps {

struct SchmidtResult {
    std::vector<double> lambdas;  // descending, sum 1
    double schmidt_number = 1.0;
    double purity = 1.0;
    std::size_t rank = 0;         // singular values kept after truncation
};

/// Singular values of the raw matrix; values below 1e-12 of the largest are dropped.
/// Throws DegenerateInputError for an all-zero matrix.
SchmidtResult schmidt_decompose(const Eigen::MatrixXcd& psi);
SchmidtResult schmidt_decompose(const JsaResult& jsa);

struct FilterSpec {
    enum class Shape { gaussian, rectangular };
    Shape shape = Shape::gaussian;
    double center_wavelength = 0.0;  // m
    double fwhm = 0.0;               // m; +inf means no filter

    void validate() const;
    double center_omega() const;
    double fwhm_omega() const;
    /// Intensity transmission in [0, 1].
    double transmission(double omega) const;
};

FilterSpec::Shape parse_filter_shape(const std::string& name);
std::string to_string(FilterSpec::Shape shape);

/// psi'(ws, wi) = psi * sqrt(T_s(ws)) * sqrt(T_i(wi)).
JsaResult apply_filters(const JsaResult& jsa, const FilterSpec& f_s, const FilterSpec& f_i);

/// Channel s: sum |psi|^2 T_s T_i / sum |psi|^2 T_i; channel i symmetric.
double filtered_heralding_ratio(const JsaResult& jsa, const FilterSpec& f_s, const FilterSpec& f_i,
                                Channel channel);

struct FilterSweepRow {
    double fwhm = 0.0;  // m
    double purity = 0.0;
    double he_s = 0.0;
    double he_i = 0.0;
    bool ok = false;
    std::string message;
};

/// Equal FWHM on both channels; shapes and centres come from the templates.
std::vector<FilterSweepRow> purity_filter_sweep(const JsaResult& jsa, const std::vector<double>& fwhms,
                                                const FilterSpec& template_s, const FilterSpec& template_i);

struct ResampleOptions {
    std::size_t points = 256;
    double gaussian_span = 6.0;  // half-width of the zoomed grid in filter FWHMs
};

/// Same sweep, but every FWHM gets its own grid zoomed on the filter pass band
/// (capped at the base grid), so narrow filters stay resolved. Heralding
/// denominators use the unfiltered marginals of `base`, interpolated onto the
/// zoomed axis.
std::vector<FilterSweepRow> purity_filter_sweep_resampled(const CrystalSpec& spec, const PumpSpec& pump,
                                                          const BeamGeometry& geom, const JsaResult& base,
                                                          const std::vector<double>& fwhms,
                                                          const FilterSpec& template_s,
                                                          const FilterSpec& template_i,
                                                          const ResampleOptions& opt = {});

/// Largest FWHM at which purity reaches `threshold`, interpolated linearly
/// against the next wider sweep point. Rows may be in any order.
std::optional<double> purity_crossing(const std::vector<FilterSweepRow>& rows, double threshold = 0.9);

}  // namespace hsps
