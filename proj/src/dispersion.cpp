#include "hsps/dispersion.hpp"

#include <cmath>
#include <sstream>

#include "hsps/constants.hpp"
#include "hsps/error.hpp"

namespace hsps {

namespace {

constexpr double kMetresPerMicron = 1e-6;

double n_squared(const AxisDispersion& ax, double l_um)
{
    const double l2 = l_um * l_um;
    double v = ax.a - ax.d * l2;
    for (const auto& t : ax.terms) {
        v += t.kind == SellmeierTerm::Kind::resonance ? t.b * l2 / (l2 - t.c) : t.b / (l2 - t.c);
    }
    return v;
}

double n_squared_derivative(const AxisDispersion& ax, double l_um)
{
    const double l2 = l_um * l_um;
    double v = -2.0 * ax.d * l_um;
    for (const auto& t : ax.terms) {
        const double den = (l2 - t.c) * (l2 - t.c);
        v += t.kind == SellmeierTerm::Kind::resonance ? -2.0 * t.b * t.c * l_um / den
                                                      : -2.0 * t.b * l_um / den;
    }
    return v;
}

double thermo_shift(const AxisDispersion& ax, double l_um, std::optional<double> temperature)
{
    if (!temperature || !ax.thermo) return 0.0;
    double rate = 0.0;
    double p = 1.0;
    for (double coeff : ax.thermo->coefficients) {
        rate += coeff * p;
        p /= l_um;
    }
    return rate * (*temperature - ax.thermo->reference_temperature);
}

double thermo_shift_derivative(const AxisDispersion& ax, double l_um,
                               std::optional<double> temperature)
{
    if (!temperature || !ax.thermo) return 0.0;
    double rate = 0.0;
    for (std::size_t i = 1; i < ax.thermo->coefficients.size(); ++i) {
        rate -= static_cast<double>(i) * ax.thermo->coefficients[i] *
                std::pow(l_um, -static_cast<double>(i) - 1.0);
    }
    return rate * (*temperature - ax.thermo->reference_temperature);
}

}  // namespace

std::string_view to_string(Polarization pol)
{
    switch (pol) {
    case Polarization::pump: return "pump";
    case Polarization::signal: return "signal";
    case Polarization::idler: return "idler";
    }
    return "?";
}

DispersionModel::DispersionModel(std::string name, std::string source, double lambda_min,
                                 double lambda_max, std::map<std::string, AxisDispersion> axes)
    : name_(std::move(name)),
      source_(std::move(source)),
      lambda_min_(lambda_min),
      lambda_max_(lambda_max),
      axes_(std::move(axes))
{
    if (!(lambda_min_ > 0.0) || !(lambda_max_ > lambda_min_)) {
        throw ConfigError("dispersion model '" + name_ + "': invalid wavelength window");
    }
    if (axes_.empty()) throw ConfigError("dispersion model '" + name_ + "': no axes");

    const double lo = lambda_min_ / kMetresPerMicron;
    const double hi = lambda_max_ / kMetresPerMicron;
    for (const auto& [axis, ax] : axes_) {
        for (const auto& t : ax.terms) {
            if (t.c > 0.0) {
                const double pole = std::sqrt(t.c);
                if (pole >= lo && pole <= hi) {
                    throw ConfigError("dispersion model '" + name_ + "' axis " + axis +
                                      ": pole inside the valid range");
                }
            }
        }
        constexpr int samples = 256;
        for (int k = 0; k <= samples; ++k) {
            const double l = lo + (hi - lo) * k / samples;
            const double n2 = n_squared(ax, l);
            if (!std::isfinite(n2) || !(n2 > 1.0)) {
                throw ConfigError("dispersion model '" + name_ + "' axis " + axis +
                                  ": index not above 1 inside the valid range");
            }
        }
    }
}

bool DispersionModel::has_axis(std::string_view axis) const
{
    return axes_.find(std::string(axis)) != axes_.end();
}

const AxisDispersion& DispersionModel::axis_or_throw(std::string_view axis) const
{
    auto it = axes_.find(std::string(axis));
    if (it == axes_.end()) {
        throw ConfigError("dispersion model '" + name_ + "' has no axis '" + std::string(axis) + "'");
    }
    return it->second;
}

void DispersionModel::check_range(double lambda) const
{
    if (lambda < lambda_min_ || lambda > lambda_max_ || !std::isfinite(lambda)) {
        std::ostringstream os;
        os << "wavelength " << lambda << " m outside dispersion model '" << name_ << "': "
           << (lambda < lambda_min_ ? "below lower bound " : "above upper bound ")
           << (lambda < lambda_min_ ? lambda_min_ : lambda_max_) << " m";
        throw DomainError(os.str());
    }
}

double DispersionModel::index(std::string_view axis, double lambda,
                              std::optional<double> temperature) const
{
    const auto& ax = axis_or_throw(axis);
    check_range(lambda);
    const double l_um = lambda / kMetresPerMicron;
    return std::sqrt(n_squared(ax, l_um)) + thermo_shift(ax, l_um, temperature);
}

double DispersionModel::index_derivative(std::string_view axis, double lambda,
                                         std::optional<double> temperature) const
{
    const auto& ax = axis_or_throw(axis);
    check_range(lambda);
    const double l_um = lambda / kMetresPerMicron;
    const double n0 = std::sqrt(n_squared(ax, l_um));
    const double dn_dl_um =
        n_squared_derivative(ax, l_um) / (2.0 * n0) + thermo_shift_derivative(ax, l_um, temperature);
    return dn_dl_um / kMetresPerMicron;
}

DispersionModel DispersionModel::constant(std::string name, double n,
                                          std::vector<std::string> axis_names, double lambda_min,
                                          double lambda_max)
{
    std::map<std::string, AxisDispersion> axes;
    for (auto& a : axis_names) axes[a] = AxisDispersion{n * n, {}, 0.0, std::nullopt};
    return DispersionModel(std::move(name), "dispersionless stub", lambda_min, lambda_max,
                           std::move(axes));
}

DispersionModel ktp_koenig_wong_fradkin()
{
    using K = SellmeierTerm::Kind;
    std::map<std::string, AxisDispersion> axes;
    axes["y"] = AxisDispersion{2.09930, {{K::resonance, 0.922683, 0.0467695}}, 0.0138408, {}};
    axes["z"] = AxisDispersion{
        2.12725, {{K::resonance, 1.18431, 0.0514852}, {K::resonance, 0.6603, 100.00507}},
        9.68956e-3, {}};
    return DispersionModel("ktp_kw_fradkin",
                           "KTP: n_y F. Koenig, F.N.C. Wong, Appl. Phys. Lett. 84, 1644 (2004); "
                           "n_z K. Fradkin et al., Appl. Phys. Lett. 74, 914 (1999)",
                           0.39e-6, 1.7e-6, std::move(axes));
}

DispersionModel ktp_kato_takaoka()
{
    using K = SellmeierTerm::Kind;
    std::map<std::string, AxisDispersion> axes;
    axes["x"] = AxisDispersion{3.29100, {{K::pole, 0.04140, 0.03978}, {K::pole, 9.35522, 31.45571}},
                               0.0, {}};
    axes["y"] = AxisDispersion{3.45018, {{K::pole, 0.04341, 0.04597}, {K::pole, 16.98825, 39.43799}},
                               0.0, {}};
    axes["z"] = AxisDispersion{
        4.59423, {{K::pole, 0.06206, 0.04763}, {K::pole, 110.80672, 86.12171}}, 0.0, {}};
    return DispersionModel("ktp_kato2002",
                           "KTP: K. Kato, E. Takaoka, Appl. Opt. 41, 5040 (2002)", 0.39e-6, 3.54e-6,
                           std::move(axes));
}

void CrystalSpec::validate() const
{
    if (!(length > 0.0)) throw ConfigError("crystal.length_m must be > 0");
    if (!(period > 0.0)) throw ConfigError("crystal.period_m must be > 0");
    if (qpm_order < 1) throw ConfigError("crystal.qpm_order must be >= 1");
    if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ConfigError("crystal.efficiency must be in (0, 1]");
    if (!model) throw ConfigError("crystal.model is unresolved");
    for (auto pol : {Polarization::pump, Polarization::signal, Polarization::idler}) {
        if (!model->has_axis(axis(pol))) {
            throw ConfigError("crystal.axes." + std::string(to_string(pol)) + ": axis '" + axis(pol) +
                              "' not in dispersion model '" + model->name() + "'");
        }
    }
}

const std::string& CrystalSpec::axis(Polarization pol) const
{
    switch (pol) {
    case Polarization::pump: return axes.pump;
    case Polarization::signal: return axes.signal;
    case Polarization::idler: return axes.idler;
    }
    return axes.pump;
}

double CrystalSpec::grating_wavevector() const
{
    return qpm_order * constants::two_pi / period;
}

double refractive_index(const DispersionModel& model, std::string_view axis, double lambda,
                        std::optional<double> temperature)
{
    return model.index(axis, lambda, temperature);
}

double refractive_index(const CrystalSpec& spec, Polarization pol, double omega)
{
    return spec.model->index(spec.axis(pol), constants::wavelength_from_omega(omega), spec.temperature);
}

double wavevector(const CrystalSpec& spec, Polarization pol, double omega)
{
    if (!(omega > 0.0)) throw DomainError("wavevector: angular frequency must be positive");
    return refractive_index(spec, pol, omega) * omega / constants::speed_of_light;
}

double group_index(const CrystalSpec& spec, Polarization pol, double omega)
{
    if (!(omega > 0.0)) throw DomainError("group_index: angular frequency must be positive");
    const double lambda = constants::wavelength_from_omega(omega);
    const auto& axis = spec.axis(pol);
    return spec.model->index(axis, lambda, spec.temperature) -
           lambda * spec.model->index_derivative(axis, lambda, spec.temperature);
}

double group_index_fd(const CrystalSpec& spec, Polarization pol, double omega)
{
    const double h = 1e-3 * omega;
    const double lo = constants::wavelength_from_omega(omega + 2.0 * h);
    const double hi = constants::wavelength_from_omega(omega - 2.0 * h);
    if (lo < spec.model->lambda_min() || hi > spec.model->lambda_max()) {
        throw DomainError("group_index_fd: difference stencil leaves the dispersion window");
    }
    auto k = [&](double w) { return wavevector(spec, pol, w); };
    const double dk = (-k(omega + 2 * h) + 8 * k(omega + h) - 8 * k(omega - h) + k(omega - 2 * h)) /
                      (12.0 * h);
    return constants::speed_of_light * dk;
}

PhaseMismatch phase_mismatch(const CrystalSpec& spec, double omega_s, double omega_i)
{
    const double dk = wavevector(spec, Polarization::pump, omega_s + omega_i) -
                      wavevector(spec, Polarization::signal, omega_s) -
                      wavevector(spec, Polarization::idler, omega_i);
    return {dk, (dk - spec.grating_wavevector()) * spec.length};
}

MatchedPair matched_frequencies(const CrystalSpec& spec, double omega_pump)
{
    const double w_lo = constants::omega_from_wavelength(spec.model->lambda_max());
    const double w_hi = constants::omega_from_wavelength(spec.model->lambda_min());
    // signal and idler must both lie inside [w_lo, w_hi]
    const double s_min = std::max(w_lo, omega_pump - w_hi);
    const double s_max = std::min(w_hi, omega_pump - w_lo);
    if (!(s_max > s_min)) throw DomainError("matched_frequencies: pump outside dispersion window");

    auto f = [&](double ws) { return phase_mismatch(spec, ws, omega_pump - ws).phi; };

    constexpr int scan = 4000;
    const double step = (s_max - s_min) / scan;
    double best = 0.0;
    bool found = false;
    double prev_w = s_min + 0.5 * step;
    double prev_f = f(prev_w);
    for (int k = 1; k < scan; ++k) {
        const double w = s_min + (k + 0.5) * step;
        const double fw = f(w);
        if ((prev_f <= 0.0) != (fw <= 0.0)) {
            double a = prev_w, b = w, fa = prev_f;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if ((fa <= 0.0) == (fm <= 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double root = 0.5 * (a + b);
            if (!found || std::abs(root - 0.5 * omega_pump) < std::abs(best - 0.5 * omega_pump)) {
                best = root;
                found = true;
            }
        }
        prev_w = w;
        prev_f = fw;
    }
    if (!found) throw DomainError("matched_frequencies: no phase-matched pair inside the dispersion window");
    return {best, omega_pump - best};
}

}  // namespace hsps
