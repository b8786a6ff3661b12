#include "hsps/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsps/constants.hpp"
#include "hsps/error.hpp"
#include "hsps/kernels/jsa_fill.hpp"
#include "hsps/quadrature.hpp"

namespace hsps {

using constants::pi;
using constants::speed_of_light;

void PumpSpec::validate() const
{
    if (!(center_wavelength > 0.0)) throw ConfigError("pump.center_wavelength_m must be > 0");
    if (!(fwhm > 0.0)) throw ConfigError("pump.fwhm_m must be > 0");
    if (!(photon_number > 0.0)) throw ConfigError("pump.photon_number must be > 0");
}

double PumpSpec::omega0() const { return constants::omega_from_wavelength(center_wavelength); }

double PumpSpec::fwhm_omega() const
{
    return constants::omega_width_from_wavelength_width(fwhm, center_wavelength);
}

double PumpSpec::sigma_omega() const { return fwhm_omega() / constants::fwhm_per_sigma; }

double pump_amplitude(const PumpSpec& pump, double omega_s, double omega_i)
{
    const double d = omega_s + omega_i - pump.omega0();
    const double sigma = pump.sigma_omega();
    return std::exp(-d * d / (4.0 * sigma * sigma));
}

double pump_spectral_measure(const PumpSpec& pump)
{
    return std::sqrt(2.0 * pi) * pump.sigma_omega();
}

BeamGeometry::BeamGeometry(Kind kind, std::array<double, 3> values) : kind_(kind), values_(values)
{
    for (double v : values_) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError(kind_ == Kind::waists ? "beams: waists must be finite and > 0"
                                                    : "beams: focal parameters must be finite and > 0");
        }
    }
}

BeamGeometry BeamGeometry::from_waists(double w_p, double w_s, double w_i)
{
    return BeamGeometry(Kind::waists, {w_p, w_s, w_i});
}

BeamGeometry BeamGeometry::from_focal(double xi_p, double xi_s, double xi_i)
{
    return BeamGeometry(Kind::focal, {xi_p, xi_s, xi_i});
}

std::array<double, 3> BeamGeometry::focal_parameters(const CrystalSpec& spec, double omega_s,
                                                     double omega_i) const
{
    if (kind_ == Kind::focal) return values_;
    const double k[3] = {wavevector(spec, Polarization::pump, omega_s + omega_i),
                         wavevector(spec, Polarization::signal, omega_s),
                         wavevector(spec, Polarization::idler, omega_i)};
    std::array<double, 3> xi{};
    for (int j = 0; j < 3; ++j) xi[j] = spec.length / (k[j] * values_[j] * values_[j]);
    return xi;
}

std::array<double, 3> BeamGeometry::waists(const CrystalSpec& spec, double omega_s, double omega_i) const
{
    if (kind_ == Kind::waists) return values_;
    const double k[3] = {wavevector(spec, Polarization::pump, omega_s + omega_i),
                         wavevector(spec, Polarization::signal, omega_s),
                         wavevector(spec, Polarization::idler, omega_i)};
    std::array<double, 3> w{};
    for (int j = 0; j < 3; ++j) w[j] = std::sqrt(spec.length / (k[j] * values_[j]));
    return w;
}

double optimal_waist(const CrystalSpec& spec, Polarization pol, double omega)
{
    return std::sqrt(spec.length / wavevector(spec, pol, omega));
}

FrequencyGrid FrequencyGrid::uniform(double center_s, double center_i, double half_width_s,
                                     double half_width_i, std::size_t n_s, std::size_t n_i)
{
    if (n_s < 2 || n_i < 2) throw ConfigError("grid: at least 2 points per axis");
    if (!(half_width_s > 0.0) || !(half_width_i > 0.0)) throw ConfigError("grid: half-width must be > 0");
    FrequencyGrid g;
    g.omega_s.resize(n_s);
    g.omega_i.resize(n_i);
    for (std::size_t k = 0; k < n_s; ++k) {
        g.omega_s[k] = center_s - half_width_s + 2.0 * half_width_s * static_cast<double>(k) / (n_s - 1);
    }
    for (std::size_t k = 0; k < n_i; ++k) {
        g.omega_i[k] = center_i - half_width_i + 2.0 * half_width_i * static_cast<double>(k) / (n_i - 1);
    }
    g.validate();
    return g;
}

void FrequencyGrid::validate() const
{
    if (omega_s.size() < 2 || omega_i.size() < 2) throw ConfigError("grid: at least 2 points per axis");
    for (const auto* axis : {&omega_s, &omega_i}) {
        if (!((*axis)[0] > 0.0)) throw ConfigError("grid: frequencies must be positive");
        for (std::size_t k = 1; k < axis->size(); ++k) {
            if (!((*axis)[k] > (*axis)[k - 1])) throw ConfigError("grid: axes must be strictly increasing");
        }
    }
}

FrequencyGrid FrequencyGrid::refined() const
{
    auto refine = [](const std::vector<double>& a) {
        std::vector<double> r(2 * a.size() - 1);
        for (std::size_t k = 0; k < a.size(); ++k) r[2 * k] = a[k];
        for (std::size_t k = 0; k + 1 < a.size(); ++k) r[2 * k + 1] = 0.5 * (a[k] + a[k + 1]);
        return r;
    };
    return {refine(omega_s), refine(omega_i)};
}

FrequencyGrid default_grid(const CrystalSpec& spec, const PumpSpec& pump, std::size_t n, double span_fwhm)
{
    const auto m = matched_frequencies(spec, pump.omega0());
    const double half = span_fwhm * pump.fwhm_omega();
    return FrequencyGrid::uniform(m.omega_s, m.omega_i, half, half, n, n);
}

DimensionlessParams dimensionless_params(const CrystalSpec& spec, const BeamGeometry& geom,
                                         double omega_s, double omega_i)
{
    const double kp = wavevector(spec, Polarization::pump, omega_s + omega_i);
    const double ks = wavevector(spec, Polarization::signal, omega_s);
    const double ki = wavevector(spec, Polarization::idler, omega_i);
    const double dk = kp - ks - ki;
    const auto [xp, xs, xi] = geom.focal_parameters(spec, omega_s, omega_i);

    DimensionlessParams d{};
    d.delta_k = dk;
    d.phi = (dk - spec.grating_wavevector()) * spec.length;
    d.a_plus = 1.0 + (ks / kp) * (xs / xp) + (ki / kp) * (xi / xp);
    d.b_plus = (1.0 - dk / kp) *
               (1.0 + (ks + dk) / (kp - dk) * (xp / xs) + (ki + dk) / (kp - dk) * (xp / xi));
    d.c = (dk / kp) * (xp * xp / (xs * xi)) * d.a_plus / (d.b_plus * d.b_plus);
    d.xi = (d.b_plus / d.a_plus) * xs * xi / xp;
    return d;
}

namespace {

std::complex<double> panel_sum(const GaussLegendreRule& rule, double lo, double hi, double phi,
                               double xi, double c)
{
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double l = mid + half * rule.nodes[k];
        const std::complex<double> num = std::polar(1.0, 0.5 * phi * l);
        const std::complex<double> den{1.0 - c * xi * xi * l * l, -xi * l};
        acc += rule.weights[k] * (num / den);
    }
    return acc * half;
}

}  // namespace

std::complex<double> overlap_kernel(double phi, double xi, double c, const KernelOptions& opt)
{
    if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("overlap_kernel: xi must be finite and > 0");
    if (!std::isfinite(phi) || !std::isfinite(c)) throw DomainError("overlap_kernel: non-finite phi or C");

    const auto& g64 = gauss_legendre_64();
    const auto& g128 = gauss_legendre_128();
    const double sx = std::sqrt(xi);

    int panels = static_cast<int>(std::max({1.0, std::ceil(std::abs(phi) / 80.0), std::ceil(xi / 8.0)}));
    double residual = 0.0;
    while (panels <= opt.max_panels) {
        std::complex<double> i64{0.0, 0.0};
        std::complex<double> i128{0.0, 0.0};
        const double width = 2.0 / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = -1.0 + p * width;
            const double hi = p + 1 == panels ? 1.0 : lo + width;
            i64 += panel_sum(g64, lo, hi, phi, xi, c);
            i128 += panel_sum(g128, lo, hi, phi, xi, c);
        }
        i64 *= sx;
        i128 *= sx;
        residual = std::abs(i64 - i128);
        if (std::isfinite(residual) && residual <= opt.rel_tol * std::abs(i128) + 1e-13 * sx) return i128;
        panels *= 2;
    }
    std::ostringstream os;
    os << "overlap_kernel: quadrature did not converge (phi=" << phi << ", xi=" << xi << ", C=" << c
       << ", residual=" << residual << ")";
    throw NumericError(os.str(), residual);
}

PrefactorBreakdown jsa_prefactor(const CrystalSpec& spec, const PumpSpec& pump,
                                 const DimensionlessParams& d, double omega_s, double omega_i)
{
    const double np = refractive_index(spec, Polarization::pump, omega_s + omega_i);
    const double ns = refractive_index(spec, Polarization::signal, omega_s);
    const double ni = refractive_index(spec, Polarization::idler, omega_i);
    const double ls = constants::wavelength_from_omega(omega_s);
    const double li = constants::wavelength_from_omega(omega_i);

    PrefactorBreakdown b{};
    b.amplitude = std::sqrt(8.0 * pi * pi * spec.efficiency * constants::hbar * ns * ni *
                            pump.photon_number * spec.length / (constants::vacuum_permittivity * np));
    b.nonlinearity = spec.chi2_eff / (ls * li);
    b.geometric = 1.0 / std::sqrt(d.a_plus * d.b_plus);
    b.pump_envelope = pump_amplitude(pump, omega_s, omega_i);
    return b;
}

std::complex<double> jsa_point(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                               double omega_s, double omega_i, const KernelOptions& opt)
{
    const auto d = dimensionless_params(spec, geom, omega_s, omega_i);
    return jsa_prefactor(spec, pump, d, omega_s, omega_i).total() * overlap_kernel(d.phi, d.xi, d.c, opt);
}

namespace {

JsaDiagnostics diagnose(const kernels::JsaFillOutput& f, double support_fraction)
{
    JsaDiagnostics diag;
    const Eigen::MatrixXd mag = f.psi.cwiseAbs();
    Eigen::Index ci = 0, cj = 0;
    const double peak = mag.maxCoeff(&ci, &cj);
    if (!(peak > 0.0)) return diag;

    diag.central_a_plus = f.a_plus(ci, cj);
    diag.central_b_plus = f.b_plus(ci, cj);
    diag.central_xi = f.xi(ci, cj);

    double amin = diag.central_a_plus, amax = amin;
    double bmin = diag.central_b_plus, bmax = bmin;
    double xmin = diag.central_xi, xmax = xmin;
    for (Eigen::Index i = 0; i < mag.rows(); ++i) {
        for (Eigen::Index j = 0; j < mag.cols(); ++j) {
            if (mag(i, j) < support_fraction * peak) continue;
            ++diag.support_points;
            diag.max_abs_c = std::max(diag.max_abs_c, std::abs(f.c(i, j)));
            amin = std::min(amin, f.a_plus(i, j));
            amax = std::max(amax, f.a_plus(i, j));
            bmin = std::min(bmin, f.b_plus(i, j));
            bmax = std::max(bmax, f.b_plus(i, j));
            xmin = std::min(xmin, f.xi(i, j));
            xmax = std::max(xmax, f.xi(i, j));
        }
    }
    diag.spread_a_plus = (amax - amin) / std::abs(diag.central_a_plus);
    diag.spread_b_plus = (bmax - bmin) / std::abs(diag.central_b_plus);
    diag.spread_xi = (xmax - xmin) / std::abs(diag.central_xi);
    return diag;
}

}  // namespace

JsaResult compute_jsa(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                      const FrequencyGrid& grid, const JsaOptions& opt)
{
    spec.validate();
    pump.validate();
    grid.validate();
    const kernels::JsaFillInput in{spec, pump, geom, grid, opt.kernel};
    auto filled = opt.parallel ? kernels::jsa_fill_omp(in) : kernels::jsa_fill_serial(in);

    JsaResult r;
    r.grid = grid;
    r.diagnostics = diagnose(filled, opt.support_fraction);
    r.psi = std::move(filled.psi);
    return r;
}

ApproximationReport approximation_report(const JsaResult& result, double c_threshold,
                                         double spread_threshold)
{
    const auto& d = result.diagnostics;
    ApproximationReport r;
    r.max_abs_c = d.max_abs_c;
    r.spread_a_plus = d.spread_a_plus;
    r.spread_b_plus = d.spread_b_plus;
    r.spread_xi = d.spread_xi;
    r.c_threshold = c_threshold;
    r.spread_threshold = spread_threshold;
    r.valid = d.support_points > 0 && d.max_abs_c <= c_threshold && d.spread_a_plus <= spread_threshold &&
              d.spread_b_plus <= spread_threshold && d.spread_xi <= spread_threshold;
    return r;
}

}  // namespace hsps
