#include "hsps/heralding.hpp"

#include <cmath>
#include <exception>

#include "hsps/constants.hpp"
#include "hsps/error.hpp"

namespace hsps {

namespace {

constexpr double kDegenerateGroupIndex = 1e-6;

double group_index_gap(const HeraldingTerms& t)
{
    const double gap = std::abs(t.group_index_s - t.group_index_i);
    if (gap < kDegenerateGroupIndex) {
        throw SingularityError("collection probability: |n'_s - n'_i| = " + std::to_string(gap) +
                               " below 1e-6; the closed form needs distinct group velocities");
    }
    return gap;
}

HeraldingPoint point_from_terms(const HeraldingTerms& t, double omega_s, double omega_i)
{
    const auto& d = t.params;
    const double atan_xi = std::atan(d.xi);
    const double atan_s = std::atan(t.b_s / t.a_s * t.xi_s);
    const double atan_i = std::atan(t.b_i / t.a_i * t.xi_i);
    const double ab = d.a_plus * d.b_plus;

    HeraldingPoint p;
    p.eta_s = atan_xi * t.a_s * t.b_s / (ab * atan_s);
    p.eta_i = atan_xi * t.a_i * t.b_i / (ab * atan_i);
    p.eta_c = std::sqrt(t.a_s * t.a_i * t.b_s * t.b_i) * atan_xi / (ab * std::sqrt(atan_s * atan_i));
    p.omega_s = omega_s;
    p.omega_i = omega_i;
    p.xi_p = t.xi_p;
    p.xi_s = t.xi_s;
    p.xi_i = t.xi_i;
    return p;
}

}  // namespace

HeraldingTerms heralding_terms(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                               double omega_s, double omega_i)
{
    HeraldingTerms t{};
    t.params = dimensionless_params(spec, geom, omega_s, omega_i);
    const auto xi = geom.focal_parameters(spec, omega_s, omega_i);
    t.xi_p = xi[0];
    t.xi_s = xi[1];
    t.xi_i = xi[2];

    const double kp = wavevector(spec, Polarization::pump, omega_s + omega_i);
    const double ks = wavevector(spec, Polarization::signal, omega_s);
    const double ki = wavevector(spec, Polarization::idler, omega_i);
    const double dk = t.params.delta_k;
    const double shrink = 1.0 - dk / kp;

    t.a_s = 2.0 * std::sqrt((1.0 + ks / kp * t.xi_s / t.xi_p) * ki / kp);
    t.a_i = 2.0 * std::sqrt((1.0 + ki / kp * t.xi_i / t.xi_p) * ks / kp);
    t.b_s = 2.0 * shrink *
            std::sqrt((1.0 + (ks + dk) / (kp - dk) * t.xi_p / t.xi_s) * (ki + dk) / (kp - dk));
    t.b_i = 2.0 * shrink *
            std::sqrt((1.0 + (ki + dk) / (kp - dk) * t.xi_p / t.xi_i) * (ks + dk) / (kp - dk));

    t.group_index_s = group_index(spec, Polarization::signal, omega_s);
    t.group_index_i = group_index(spec, Polarization::idler, omega_i);

    const double np = refractive_index(spec, Polarization::pump, omega_s + omega_i);
    const double ns = refractive_index(spec, Polarization::signal, omega_s);
    const double ni = refractive_index(spec, Polarization::idler, omega_i);
    const double ls = constants::wavelength_from_omega(omega_s);
    const double li = constants::wavelength_from_omega(omega_i);
    const double chi = spec.chi2_eff / (ls * li);
    t.scale = 64.0 * std::pow(constants::pi, 3) * constants::hbar * constants::speed_of_light *
              spec.efficiency * ns * ni / (constants::vacuum_permittivity * np) * chi * chi *
              pump.photon_number;
    return t;
}

double pair_probability(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                        double omega_s, double omega_i)
{
    const auto t = heralding_terms(spec, pump, geom, omega_s, omega_i);
    return t.scale / group_index_gap(t) * std::atan(t.params.xi) / (t.params.a_plus * t.params.b_plus);
}

double single_probability(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                          double omega_s, double omega_i, Channel channel)
{
    const auto t = heralding_terms(spec, pump, geom, omega_s, omega_i);
    const double a = channel == Channel::signal ? t.a_s : t.a_i;
    const double b = channel == Channel::signal ? t.b_s : t.b_i;
    const double x = channel == Channel::signal ? t.xi_s : t.xi_i;
    return t.scale / group_index_gap(t) * std::atan(b / a * x) / (a * b);
}

HeraldingPoint heralding_point(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                               double omega_s, double omega_i)
{
    return point_from_terms(heralding_terms(spec, pump, geom, omega_s, omega_i), omega_s, omega_i);
}

double heralding_efficiency(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                            double omega_s, double omega_i, Channel channel)
{
    const auto p = heralding_point(spec, pump, geom, omega_s, omega_i);
    return channel == Channel::signal ? p.eta_s : p.eta_i;
}

namespace {

struct PointTask {
    double omega_s, omega_i;
    BeamGeometry geom;
};

HeraldingSweep run_points(const CrystalSpec& spec, const PumpSpec& pump, const std::vector<PointTask>& tasks)
{
    const std::size_t n = tasks.size();
    HeraldingSweep sweep;
    sweep.rows.assign(n, HeraldingPoint{});
    std::vector<std::string> messages(n);
    std::vector<char> good(n, 0);

#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
        const auto& task = tasks[static_cast<std::size_t>(k)];
        try {
            sweep.rows[k] = heralding_point(spec, pump, task.geom, task.omega_s, task.omega_i);
            good[k] = std::isfinite(sweep.rows[k].eta_c) ? 1 : 0;
            if (!good[k]) messages[k] = "non-finite heralding efficiency";
        } catch (const std::exception& e) {
            messages[k] = e.what();
        }
    }

    sweep.ok.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        sweep.ok[k] = good[k] != 0;
        if (!sweep.ok[k]) {
            sweep.rows[k] = HeraldingPoint{};
            sweep.rows[k].omega_s = tasks[k].omega_s;
            sweep.rows[k].omega_i = tasks[k].omega_i;
            sweep.errors.push_back({k, messages[k]});
        } else if (!sweep.argmax || sweep.rows[k].eta_c > sweep.rows[*sweep.argmax].eta_c) {
            sweep.argmax = k;
        }
    }
    return sweep;
}

}  // namespace

HeraldingSweep sweep_heralding_wavelength(const CrystalSpec& spec, const PumpSpec& pump,
                                          const BeamGeometry& geom, double lambda_s_min,
                                          double lambda_s_max, std::size_t n)
{
    if (n < 1 || !(lambda_s_max >= lambda_s_min) || !(lambda_s_min > 0.0)) {
        throw ConfigError("heralding.wavelength sweep: need 0 < min <= max and n >= 1");
    }
    const double wp = pump.omega0();
    std::vector<PointTask> tasks;
    tasks.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double l = n == 1 ? lambda_s_min
                                : lambda_s_min + (lambda_s_max - lambda_s_min) * static_cast<double>(k) / (n - 1);
        const double ws = constants::omega_from_wavelength(l);
        tasks.push_back({ws, wp - ws, geom});
    }
    auto sweep = run_points(spec, pump, tasks);
    sweep.note = geom.kind() == BeamGeometry::Kind::waists
                     ? "waists held fixed; focal parameters follow k(omega)"
                     : "focal parameters pinned by configuration";
    return sweep;
}

HeraldingSweep sweep_heralding_focal(const CrystalSpec& spec, const PumpSpec& pump, double omega_s,
                                     double omega_i, const std::vector<double>& xi_p_values,
                                     const std::vector<double>& xi_s_values,
                                     const std::vector<double>& xi_i_values, FocalMode mode)
{
    std::vector<PointTask> tasks;
    for (double xp : xi_p_values) {
        for (double xs : xi_s_values) {
            if (mode == FocalMode::symmetric) {
                tasks.push_back({omega_s, omega_i, BeamGeometry::from_focal(xp, xs, xs)});
            } else {
                for (double xi : xi_i_values) {
                    tasks.push_back({omega_s, omega_i, BeamGeometry::from_focal(xp, xs, xi)});
                }
            }
        }
    }
    auto sweep = run_points(spec, pump, tasks);
    sweep.note = mode == FocalMode::symmetric ? "focal parameters pinned, xi_s = xi_i"
                                              : "focal parameters pinned, xi_s and xi_i independent";
    return sweep;
}

FrequencyGrid focal_scan_grid(const CrystalSpec& spec, const PumpSpec& pump, std::size_t n, double span_fwhm)
{
    return default_grid(spec, pump, n, span_fwhm);
}

namespace {

/// Compass search for the maximum of |psi|^2 starting from a grid node.
FocalJsiRow polish_peak(const CrystalSpec& spec, const PumpSpec& pump, const BeamGeometry& geom,
                        double ws, double wi, double step_s, double step_i)
{
    auto f = [&](double a, double b) { return std::norm(jsa_point(spec, pump, geom, a, b)); };
    double best = f(ws, wi);
    const double floor_s = 1e-7 * step_s;
    while (step_s > floor_s) {
        bool moved = false;
        const double cand[4][2] = {{ws + step_s, wi}, {ws - step_s, wi}, {ws, wi + step_i}, {ws, wi - step_i}};
        for (const auto& c : cand) {
            const double v = f(c[0], c[1]);
            if (v > best) {
                best = v;
                ws = c[0];
                wi = c[1];
                moved = true;
                break;
            }
        }
        if (!moved) {
            step_s *= 0.5;
            step_i *= 0.5;
        }
    }
    const auto xi = geom.values();
    return {xi[0], xi[1], xi[2], best, ws, wi};
}

}  // namespace

FocalJsiTable max_jsi_over_focal(const CrystalSpec& spec, const PumpSpec& pump,
                                 const std::vector<double>& xi_values, const FrequencyGrid& grid,
                                 FocalTriples triples)
{
    std::vector<std::array<double, 3>> combos;
    if (triples == FocalTriples::constrained) {
        for (double x : xi_values) combos.push_back({x, x, x});
    } else {
        for (double a : xi_values)
            for (double b : xi_values)
                for (double c : xi_values) combos.push_back({a, b, c});
    }

    const double ds = grid.omega_s[1] - grid.omega_s[0];
    const double di = grid.omega_i[1] - grid.omega_i[0];

    FocalJsiTable table;
    table.rows.resize(combos.size());
    table.ok.assign(combos.size(), false);
    for (std::size_t k = 0; k < combos.size(); ++k) {
        try {
            const auto geom = BeamGeometry::from_focal(combos[k][0], combos[k][1], combos[k][2]);
            const auto r = compute_jsa(spec, pump, geom, grid);
            Eigen::Index bi = 0, bj = 0;
            r.psi.cwiseAbs2().maxCoeff(&bi, &bj);
            table.rows[k] = polish_peak(spec, pump, geom, grid.omega_s[static_cast<std::size_t>(bi)],
                                        grid.omega_i[static_cast<std::size_t>(bj)], ds, di);
            table.ok[k] = true;
            if (!table.argmax || table.rows[k].max_jsi > table.rows[*table.argmax].max_jsi) table.argmax = k;
        } catch (const std::exception& e) {
            table.rows[k] = {combos[k][0], combos[k][1], combos[k][2], 0.0, 0.0, 0.0};
            table.errors.push_back({k, e.what()});
        }
    }
    return table;
}

}  // namespace hsps
