#include "hsps/poling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "hsps/constants.hpp"
#include "hsps/error.hpp"

namespace hsps {

using constants::pi;

namespace {

double sinc(double x)
{
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// Contribution of domain n with orientation +1.
std::complex<double> domain_term(double width, double length, double delta_k, std::size_t n)
{
    const double x = delta_k * width;
    return (width / length) * sinc(0.5 * x) *
           std::polar(1.0, -0.5 * x - delta_k * width * static_cast<double>(n));
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const char* key)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError(std::string("poling structure: cannot parse ") + key + " '" + s + "'");
    }
    return v;
}

}  // namespace

void PolingStructure::validate() const
{
    if (!(domain_width > 0.0)) throw DomainError("poling structure: domain width must be > 0");
    if (signs.empty()) throw DomainError("poling structure: needs at least one domain");
    for (auto s : signs)
        if (s != 1 && s != -1) throw DomainError("poling structure: orientations must be +1 or -1");
}

PolingStructure periodic_structure(double length, double period)
{
    if (!(length > 0.0) || !(period > 0.0)) throw DomainError("periodic_structure: L and period must be > 0");
    PolingStructure p;
    p.domain_width = 0.5 * period;
    p.period = period;
    const auto m = static_cast<std::size_t>(std::max(1.0, std::round(length / p.domain_width)));
    p.signs.resize(m);
    for (std::size_t n = 0; n < m; ++n) p.signs[n] = n % 2 == 0 ? 1 : -1;
    return p;
}

double target_nonlinearity(double z, double length, double sigma, double period)
{
    const double carrier = std::cos(constants::two_pi * z / period);
    if (std::isinf(sigma)) return carrier;
    const double d = z - 0.5 * length;
    return std::exp(-d * d / (2.0 * sigma * sigma)) * carrier;
}

double target_pmf(double z, double length, double sigma, double /*period*/)
{
    if (std::isinf(sigma)) return z / (2.0 * length);
    const double r = 2.0 * std::sqrt(2.0) * sigma;
    return std::sqrt(pi / 2.0) * sigma / (2.0 * length) *
           (std::erf((2.0 * z - length) / r) + std::erf(length / r));
}

std::complex<double> partial_pmf(const PolingStructure& p, double delta_k, std::size_t count)
{
    const double length = p.length();
    const double x = delta_k * p.domain_width;
    std::complex<double> sum{0.0, 0.0};
    const std::size_t m = std::min(count, p.signs.size());
    for (std::size_t n = 0; n < m; ++n) {
        sum += static_cast<double>(p.signs[n]) * std::polar(1.0, -x * static_cast<double>(n));
    }
    return (p.domain_width / length) * sinc(0.5 * x) * std::polar(1.0, -0.5 * x) * sum;
}

std::complex<double> discrete_pmf(const PolingStructure& p, double delta_k)
{
    return partial_pmf(p, delta_k, p.signs.size());
}

PolingStructure optimize_domains(double length, double period, double sigma, TargetScaling scaling,
                                 OptimizeReport* report)
{
    if (!(length > 0.0) || !(period > 0.0) || !(sigma > 0.0)) {
        throw DomainError("optimize_domains: L, period and sigma must be > 0");
    }
    PolingStructure p = periodic_structure(length, period);
    p.sigma = sigma;
    const std::size_t m = p.signs.size();
    const double w = p.domain_width;
    const double l_eff = p.length();
    const double k = constants::two_pi / period;

    std::vector<double> target(m + 1);
    for (std::size_t n = 0; n <= m; ++n) target[n] = target_pmf(w * static_cast<double>(n), l_eff, sigma, period);

    const double unit = std::abs(domain_term(w, l_eff, k, 0));
    double steepest = 0.0;
    for (std::size_t n = 0; n < m; ++n) steepest = std::max(steepest, target[n + 1] - target[n]);
    const double end_scale = std::abs(discrete_pmf(periodic_structure(l_eff, period), k)) / target[m];
    const double slope_scale = unit / steepest;
    const double scale = scaling == TargetScaling::end_amplitude ? end_scale : std::min(end_scale, slope_scale);
    const std::complex<double> direction = std::polar(1.0, -0.5 * k * w);

    std::complex<double> phi{0.0, 0.0};
    double max_dev = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
        const auto term = domain_term(w, l_eff, k, n);
        const auto goal = scale * target[n + 1] * direction;
        const double dev_plus = std::abs(phi + term - goal);
        const double dev_minus = std::abs(phi - term - goal);
        p.signs[n] = dev_plus <= dev_minus ? 1 : -1;
        phi += static_cast<double>(p.signs[n]) * term;
        max_dev = std::max(max_dev, std::min(dev_plus, dev_minus));
    }

    if (report) *report = {scale, end_scale, slope_scale, max_dev, unit};
    return p;
}

TargetScaling parse_target_scaling(const std::string& name)
{
    if (name == "end_amplitude") return TargetScaling::end_amplitude;
    if (name == "slope_feasible") return TargetScaling::slope_feasible;
    throw ConfigError("poling.scaling: expected 'end_amplitude' or 'slope_feasible', got '" + name + "'");
}

std::string to_string(TargetScaling scaling)
{
    return scaling == TargetScaling::end_amplitude ? "end_amplitude" : "slope_feasible";
}

PmfCurve pmf_curve(const PolingStructure& p, const std::vector<double>& delta_k)
{
    p.validate();
    PmfCurve c;
    c.delta_k = delta_k;
    c.values.resize(delta_k.size());
    for (std::size_t k = 0; k < delta_k.size(); ++k) c.values[k] = discrete_pmf(p, delta_k[k]);
    const double period = p.period > 0.0 ? p.period : 2.0 * p.domain_width;
    c.normalization = std::abs(discrete_pmf(periodic_structure(p.length(), period), constants::two_pi / period));
    return c;
}

double side_lobe_level_db(const PmfCurve& curve)
{
    const std::size_t n = curve.values.size();
    if (n < 3) throw DegenerateInputError("side_lobe_level_db: need at least 3 samples");
    std::vector<double> mag(n);
    for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(curve.values[k]);
    const std::size_t peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());

    std::size_t left = peak;
    while (left > 0 && mag[left - 1] < mag[left]) --left;
    std::size_t right = peak;
    while (right + 1 < n && mag[right + 1] < mag[right]) ++right;

    double side = 0.0;
    for (std::size_t k = 0; k < left; ++k) side = std::max(side, mag[k]);
    for (std::size_t k = right + 1; k < n; ++k) side = std::max(side, mag[k]);
    if (side == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(side / mag[peak]);
}

double pump_envelope_alpha(const PumpSpec& pump, double omega_s, double omega_i)
{
    const double d = omega_s + omega_i - pump.omega0();
    const double s = pump.sigma_omega();
    return std::exp(-d * d / (s * s));
}

Eigen::MatrixXcd pmf_jsa(const CrystalSpec& spec, const PumpSpec& pump, const PmfProvider& pmf,
                         const FrequencyGrid& grid)
{
    grid.validate();
    const auto rows = static_cast<Eigen::Index>(grid.rows());
    const auto cols = static_cast<Eigen::Index>(grid.cols());
    Eigen::MatrixXcd psi(rows, cols);
    std::string error;
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) {
        try {
            for (Eigen::Index j = 0; j < cols; ++j) {
                const double ws = grid.omega_s[static_cast<std::size_t>(i)];
                const double wi = grid.omega_i[static_cast<std::size_t>(j)];
                psi(i, j) = pump_envelope_alpha(pump, ws, wi) * pmf(phase_mismatch(spec, ws, wi).delta_k);
            }
        } catch (const std::exception& e) {
#pragma omp critical(hsps_pmf_jsa_error)
            if (error.empty()) error = "pmf_jsa row " + std::to_string(i) + ": " + e.what();
        }
    }
    if (!error.empty()) throw DomainError(error);
    return psi;
}

double purity_from_pmf(const CrystalSpec& spec, const PumpSpec& pump, const PmfProvider& pmf,
                       const FrequencyGrid& grid)
{
    return schmidt_decompose(pmf_jsa(spec, pump, pmf, grid)).purity;
}

FrequencyGrid poling_grid(const CrystalSpec& spec, const PumpSpec& pump, std::size_t n, double pump_span,
                          double pmf_span, double points_per_lobe)
{
    const auto m = matched_frequencies(spec, pump.omega0());
    const double gap = std::abs(group_index(spec, Polarization::signal, m.omega_s) -
                                group_index(spec, Polarization::idler, m.omega_i));
    double half = pump_span * pump.fwhm_omega();
    if (gap > 0.0) {
        const double lobe = constants::two_pi * constants::speed_of_light / (spec.length * gap);
        half = std::max(half, pmf_span * lobe);
        const auto needed = static_cast<std::size_t>(std::ceil(2.0 * half * points_per_lobe / lobe)) + 1;
        n = std::max(n, needed);
    }
    return FrequencyGrid::uniform(m.omega_s, m.omega_i, half, half, n, n);
}

Landscape purity_landscape(const CrystalSpec& spec, const PumpSpec& pump, const std::vector<double>& pump_fwhm,
                           const std::vector<double>& lengths, StructureKind kind, const LandscapeOptions& opt)
{
    Landscape out;
    out.pump_fwhm = pump_fwhm;
    out.length = lengths;
    const auto rows = static_cast<Eigen::Index>(pump_fwhm.size());
    const auto cols = static_cast<Eigen::Index>(lengths.size());
    out.purity = Eigen::MatrixXd::Constant(rows, cols, std::numeric_limits<double>::quiet_NaN());
    out.cell_errors.assign(pump_fwhm.size() * lengths.size(), "");

#pragma omp parallel for schedule(dynamic, 1)
    for (Eigen::Index cell = 0; cell < rows * cols; ++cell) {
        const Eigen::Index r = cell / cols;
        const Eigen::Index c = cell % cols;
        try {
            CrystalSpec s = spec;
            s.length = lengths[static_cast<std::size_t>(c)];
            PumpSpec pp = pump;
            pp.fwhm = pump_fwhm[static_cast<std::size_t>(r)];
            s.validate();
            pp.validate();
            const auto structure = kind == StructureKind::periodic
                                       ? periodic_structure(s.length, s.period)
                                       : optimize_domains(s.length, s.period, opt.sigma_fraction * s.length, opt.scaling);
            const PmfProvider pmf = [&structure](double dk) { return discrete_pmf(structure, dk); };
            out.purity(r, c) = purity_from_pmf(s, pp, pmf, poling_grid(s, pp, opt.grid_points));
        } catch (const std::exception& e) {
            out.cell_errors[static_cast<std::size_t>(cell)] = e.what();
        }
    }
    return out;
}

void write_structure(std::ostream& os, const PolingStructure& p)
{
    p.validate();
    os << "hsps-poling 1\n";
    os << "domain_width_m " << format_double(p.domain_width) << '\n';
    os << "domains " << p.signs.size() << '\n';
    os << "period_m " << format_double(p.period) << '\n';
    os << "sigma_m " << format_double(p.sigma) << '\n';
    os << "runs";
    std::size_t k = 0;
    while (k < p.signs.size()) {
        std::size_t j = k;
        while (j < p.signs.size() && p.signs[j] == p.signs[k]) ++j;
        os << ' ' << (p.signs[k] > 0 ? "" : "-") << (j - k);
        k = j;
    }
    os << '\n';
}

PolingStructure read_structure(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "hsps-poling 1") {
        throw DataError("poling structure: missing 'hsps-poling 1' header");
    }
    PolingStructure p;
    std::size_t declared = 0;
    bool have_runs = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "runs") {
            std::string tok;
            while (ls >> tok) {
                long long run = 0;
                auto res = std::from_chars(tok.data(), tok.data() + tok.size(), run);
                if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || run == 0) {
                    throw DataError("poling structure: bad run token '" + tok + "'");
                }
                const std::int8_t s = run > 0 ? 1 : -1;
                p.signs.insert(p.signs.end(), static_cast<std::size_t>(run > 0 ? run : -run), s);
            }
            have_runs = true;
            continue;
        }
        std::string value;
        ls >> value;
        if (key == "domain_width_m") {
            p.domain_width = parse_double(value, "domain_width_m");
        } else if (key == "domains") {
            declared = static_cast<std::size_t>(parse_double(value, "domains"));
        } else if (key == "period_m") {
            p.period = parse_double(value, "period_m");
        } else if (key == "sigma_m") {
            p.sigma = parse_double(value, "sigma_m");
        } else {
            throw DataError("poling structure: unknown key '" + key + "'");
        }
    }
    if (!have_runs) throw DataError("poling structure: missing 'runs' line");
    if (p.signs.size() != declared) {
        throw DataError("poling structure: runs give " + std::to_string(p.signs.size()) + " domains, header says " +
                        std::to_string(declared));
    }
    p.validate();
    return p;
}

}  // namespace hsps
