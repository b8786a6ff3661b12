#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsps {

enum class Polarization { pump, signal, idler };

std::string_view to_string(Polarization pol);

/// One resonance of a Sellmeier expansion in n^2, wavelength in micrometres.
///   resonance: b * l^2 / (l^2 - c)
///   pole:      b / (l^2 - c)
struct SellmeierTerm {
    enum class Kind { resonance, pole };
    Kind kind = Kind::resonance;
    double b = 0.0;
    double c = 0.0;  // um^2
};

/// Linear temperature correction dn/dT = sum_i coefficients[i] * l^-i (l in um).
struct ThermoOptic {
    double reference_temperature = 20.0;  // deg C
    std::vector<double> coefficients;
};

/// n^2(l) = a + sum(terms) - d * l^2, l in micrometres.
struct AxisDispersion {
    double a = 1.0;
    std::vector<SellmeierTerm> terms;
    double d = 0.0;
    std::optional<ThermoOptic> thermo;
};

/// Named set of per-axis Sellmeier coefficients with a validity window.
///
/// Invariants (checked at construction): every axis has n > 1 and no pole
/// anywhere inside [lambda_min, lambda_max].
class DispersionModel {
public:
    DispersionModel(std::string name, std::string source, double lambda_min, double lambda_max,
                    std::map<std::string, AxisDispersion> axes);

    const std::string& name() const { return name_; }
    const std::string& source() const { return source_; }
    double lambda_min() const { return lambda_min_; }
    double lambda_max() const { return lambda_max_; }
    const std::map<std::string, AxisDispersion>& axes() const { return axes_; }
    bool has_axis(std::string_view axis) const;

    /// Refractive index; wavelength in metres. Throws DomainError outside the window.
    double index(std::string_view axis, double lambda, std::optional<double> temperature = {}) const;
    /// dn/dlambda with lambda in metres (units 1/m).
    double index_derivative(std::string_view axis, double lambda,
                            std::optional<double> temperature = {}) const;

    /// Dispersionless stub: every listed axis has the given constant index.
    static DispersionModel constant(std::string name, double n, std::vector<std::string> axis_names,
                                    double lambda_min = 100e-9, double lambda_max = 10e-6);

private:
    const AxisDispersion& axis_or_throw(std::string_view axis) const;
    void check_range(double lambda) const;

    std::string name_;
    std::string source_;
    double lambda_min_;
    double lambda_max_;
    std::map<std::string, AxisDispersion> axes_;
};

/// Literature KTP sets shipped with the toolkit.
DispersionModel ktp_koenig_wong_fradkin();
DispersionModel ktp_kato_takaoka();

struct AxisMapping {
    std::string pump = "y";
    std::string signal = "z";
    std::string idler = "y";
};

struct CrystalSpec {
    double length = 2.0e-3;    // m
    double period = 29.4e-6;   // m
    int qpm_order = 1;
    double chi2_eff = 4.6e-12; // m/V
    double efficiency = 1.0;
    AxisMapping axes;
    std::shared_ptr<const DispersionModel> model;
    std::optional<double> temperature;  // deg C; nullopt = reference temperature

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
    const std::string& axis(Polarization pol) const;
    double grating_wavevector() const;  // m * 2 pi / period
};

double refractive_index(const DispersionModel& model, std::string_view axis, double lambda,
                        std::optional<double> temperature = {});

double refractive_index(const CrystalSpec& spec, Polarization pol, double omega);

/// k = n(lambda) * omega / c.
double wavevector(const CrystalSpec& spec, Polarization pol, double omega);

/// c * dk/domega, from the analytic derivative of the Sellmeier form.
double group_index(const CrystalSpec& spec, Polarization pol, double omega);

/// c * dk/domega by a 5-point central difference with step 1e-3 * omega.
double group_index_fd(const CrystalSpec& spec, Polarization pol, double omega);

struct PhaseMismatch {
    double delta_k;  // k_p - k_s - k_i, rad/m
    double phi;      // (delta_k - m K) L
};

PhaseMismatch phase_mismatch(const CrystalSpec& spec, double omega_s, double omega_i);

struct MatchedPair {
    double omega_s;
    double omega_i;
};

/// Signal/idler pair with phi = 0 at fixed pump frequency, nearest to degeneracy.
/// Throws DomainError when no root exists inside the dispersion window.
MatchedPair matched_frequencies(const CrystalSpec& spec, double omega_pump);

}  // namespace hsps
