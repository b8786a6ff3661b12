#include "hsps/purity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "hsps/constants.hpp"
#include "hsps/error.hpp"

namespace hsps {

SchmidtResult schmidt_decompose(const Eigen::MatrixXcd& psi)
{
    if (psi.size() == 0) throw DegenerateInputError("schmidt_decompose: empty matrix");
    if (!psi.allFinite()) throw NumericError("schmidt_decompose: non-finite amplitude");
    if (psi.cwiseAbs().maxCoeff() == 0.0) throw DegenerateInputError("schmidt_decompose: all-zero amplitude");

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(psi);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cut = 1e-12 * sv(0);

    SchmidtResult r;
    double total = 0.0;
    for (Eigen::Index k = 0; k < sv.size() && sv(k) >= cut; ++k) {
        r.lambdas.push_back(sv(k) * sv(k));
        total += sv(k) * sv(k);
    }
    double sum_sq = 0.0;
    for (double& l : r.lambdas) {
        l /= total;
        sum_sq += l * l;
    }
    r.rank = r.lambdas.size();
    r.schmidt_number = 1.0 / sum_sq;
    r.purity = sum_sq;
    return r;
}

SchmidtResult schmidt_decompose(const JsaResult& jsa) { return schmidt_decompose(jsa.psi); }

void FilterSpec::validate() const
{
    if (!(center_wavelength > 0.0)) throw ConfigError("filters: center_wavelength_m must be > 0");
    if (!(fwhm > 0.0)) throw ConfigError("filters: fwhm_m must be > 0");
}

double FilterSpec::center_omega() const { return constants::omega_from_wavelength(center_wavelength); }

double FilterSpec::fwhm_omega() const
{
    return constants::omega_width_from_wavelength_width(fwhm, center_wavelength);
}

double FilterSpec::transmission(double omega) const
{
    if (std::isinf(fwhm)) return 1.0;
    const double d = omega - center_omega();
    const double width = fwhm_omega();
    if (shape == Shape::rectangular) return std::abs(d) <= 0.5 * width ? 1.0 : 0.0;
    const double sigma = width / constants::fwhm_per_sigma;
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

FilterSpec::Shape parse_filter_shape(const std::string& name)
{
    if (name == "gaussian") return FilterSpec::Shape::gaussian;
    if (name == "rectangular") return FilterSpec::Shape::rectangular;
    throw ConfigError("filters.shape: expected 'gaussian' or 'rectangular', got '" + name + "'");
}

std::string to_string(FilterSpec::Shape shape)
{
    return shape == FilterSpec::Shape::gaussian ? "gaussian" : "rectangular";
}

namespace {

std::vector<double> amplitude_profile(const std::vector<double>& axis, const FilterSpec& f)
{
    std::vector<double> a(axis.size());
    for (std::size_t k = 0; k < axis.size(); ++k) a[k] = std::sqrt(f.transmission(axis[k]));
    return a;
}

void check_center_inside(const std::vector<double>& axis, const FilterSpec& f, const char* which)
{
    const double w = f.center_omega();
    if (w < axis.front() || w > axis.back()) {
        throw DomainError(std::string("apply_filters: ") + which + " filter centre outside the grid");
    }
}

}  // namespace

JsaResult apply_filters(const JsaResult& jsa, const FilterSpec& f_s, const FilterSpec& f_i)
{
    f_s.validate();
    f_i.validate();
    check_center_inside(jsa.grid.omega_s, f_s, "signal");
    check_center_inside(jsa.grid.omega_i, f_i, "idler");
    const auto as = amplitude_profile(jsa.grid.omega_s, f_s);
    const auto ai = amplitude_profile(jsa.grid.omega_i, f_i);

    JsaResult out = jsa;
    for (Eigen::Index j = 0; j < out.psi.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.psi.rows(); ++i) {
            const double t = as[static_cast<std::size_t>(i)] * ai[static_cast<std::size_t>(j)];
            if (t != 1.0) out.psi(i, j) *= t;
        }
    }
    return out;
}

double filtered_heralding_ratio(const JsaResult& jsa, const FilterSpec& f_s, const FilterSpec& f_i,
                                Channel channel)
{
    std::vector<double> ts(jsa.grid.omega_s.size()), ti(jsa.grid.omega_i.size());
    for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = f_s.transmission(jsa.grid.omega_s[k]);
    for (std::size_t k = 0; k < ti.size(); ++k) ti[k] = f_i.transmission(jsa.grid.omega_i[k]);

    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < jsa.psi.cols(); ++j) {
        for (Eigen::Index i = 0; i < jsa.psi.rows(); ++i) {
            const double p = std::norm(jsa.psi(i, j));
            const double both = p * ts[static_cast<std::size_t>(i)] * ti[static_cast<std::size_t>(j)];
            num += both;
            den += channel == Channel::signal ? p * ti[static_cast<std::size_t>(j)]
                                              : p * ts[static_cast<std::size_t>(i)];
        }
    }
    if (!(den > 0.0)) throw DegenerateInputError("filtered_heralding_ratio: heralding channel passes nothing");
    return num / den;
}

namespace {

FilterSpec with_fwhm(FilterSpec f, double fwhm)
{
    f.fwhm = fwhm;
    return f;
}

}  // namespace

std::vector<FilterSweepRow> purity_filter_sweep(const JsaResult& jsa, const std::vector<double>& fwhms,
                                                const FilterSpec& template_s, const FilterSpec& template_i)
{
    std::vector<FilterSweepRow> rows(fwhms.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(fwhms.size()); ++k) {
        auto& row = rows[static_cast<std::size_t>(k)];
        row.fwhm = fwhms[static_cast<std::size_t>(k)];
        try {
            const auto fs = with_fwhm(template_s, row.fwhm);
            const auto fi = with_fwhm(template_i, row.fwhm);
            row.purity = schmidt_decompose(apply_filters(jsa, fs, fi)).purity;
            row.he_s = filtered_heralding_ratio(jsa, fs, fi, Channel::signal);
            row.he_i = filtered_heralding_ratio(jsa, fs, fi, Channel::idler);
            row.ok = true;
        } catch (const std::exception& e) {
            row.message = e.what();
        }
    }
    return rows;
}

namespace {

/// Marginal density of |psi|^2 on the kept axis.
std::vector<double> marginal(const JsaResult& jsa, Channel keep)
{
    const auto& g = jsa.grid;
    if (keep == Channel::idler) {
        const double h = g.omega_s[1] - g.omega_s[0];
        std::vector<double> m(g.cols(), 0.0);
        for (Eigen::Index j = 0; j < jsa.psi.cols(); ++j) m[j] = jsa.psi.col(j).squaredNorm() * h;
        return m;
    }
    const double h = g.omega_i[1] - g.omega_i[0];
    std::vector<double> m(g.rows(), 0.0);
    for (Eigen::Index i = 0; i < jsa.psi.rows(); ++i) m[i] = jsa.psi.row(i).squaredNorm() * h;
    return m;
}

double interpolate(const std::vector<double>& axis, const std::vector<double>& v, double x)
{
    if (x <= axis.front()) return x == axis.front() ? v.front() : 0.0;
    if (x >= axis.back()) return x == axis.back() ? v.back() : 0.0;
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - axis.begin()) - 1;
    const double t = (x - axis[k]) / (axis[k + 1] - axis[k]);
    return v[k] + t * (v[k + 1] - v[k]);
}

double zoom_half_width(const FilterSpec& f, const ResampleOptions& opt, double cap)
{
    if (std::isinf(f.fwhm)) return cap;
    const double w = f.fwhm_omega();
    const double h = f.shape == FilterSpec::Shape::gaussian ? opt.gaussian_span * w : 0.5 * w * (1.0 - 1e-9);
    return std::min(h, cap);
}

}  // namespace

std::vector<FilterSweepRow> purity_filter_sweep_resampled(const CrystalSpec& spec, const PumpSpec& pump,
                                                          const BeamGeometry& geom, const JsaResult& base,
                                                          const std::vector<double>& fwhms,
                                                          const FilterSpec& template_s,
                                                          const FilterSpec& template_i,
                                                          const ResampleOptions& opt)
{
    const auto& bg = base.grid;
    const double cap_s = 0.5 * (bg.omega_s.back() - bg.omega_s.front());
    const double cap_i = 0.5 * (bg.omega_i.back() - bg.omega_i.front());
    const auto marg_s = marginal(base, Channel::signal);
    const auto marg_i = marginal(base, Channel::idler);

    std::vector<FilterSweepRow> rows(fwhms.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(fwhms.size()); ++k) {
        auto& row = rows[static_cast<std::size_t>(k)];
        row.fwhm = fwhms[static_cast<std::size_t>(k)];
        try {
            const auto fs = with_fwhm(template_s, row.fwhm);
            const auto fi = with_fwhm(template_i, row.fwhm);
            fs.validate();
            fi.validate();
            const double cs = std::isinf(row.fwhm) ? 0.5 * (bg.omega_s.front() + bg.omega_s.back()) : fs.center_omega();
            const double ci = std::isinf(row.fwhm) ? 0.5 * (bg.omega_i.front() + bg.omega_i.back()) : fi.center_omega();
            const auto grid = FrequencyGrid::uniform(cs, ci, zoom_half_width(fs, opt, cap_s),
                                                     zoom_half_width(fi, opt, cap_i), opt.points, opt.points);
            JsaOptions jo;
            jo.parallel = false;
            const auto zoomed = compute_jsa(spec, pump, geom, grid, jo);
            const auto filtered = apply_filters(zoomed, fs, fi);
            row.purity = schmidt_decompose(filtered).purity;

            const double hs = grid.omega_s[1] - grid.omega_s[0];
            const double hi = grid.omega_i[1] - grid.omega_i[0];
            const double both = filtered.psi.squaredNorm() * hs * hi;
            double den_s = 0.0, den_i = 0.0;
            for (double w : grid.omega_i) den_s += fi.transmission(w) * interpolate(bg.omega_i, marg_i, w) * hi;
            for (double w : grid.omega_s) den_i += fs.transmission(w) * interpolate(bg.omega_s, marg_s, w) * hs;
            if (!(den_s > 0.0) || !(den_i > 0.0)) {
                throw DegenerateInputError("filter sweep: heralding channel passes nothing");
            }
            row.he_s = both / den_s;
            row.he_i = both / den_i;
            row.ok = true;
        } catch (const std::exception& e) {
            row.message = e.what();
        }
    }
    return rows;
}

std::optional<double> purity_crossing(const std::vector<FilterSweepRow>& rows, double threshold)
{
    std::vector<const FilterSweepRow*> good;
    for (const auto& r : rows)
        if (r.ok && std::isfinite(r.fwhm)) good.push_back(&r);
    std::sort(good.begin(), good.end(), [](auto* a, auto* b) { return a->fwhm < b->fwhm; });

    for (std::size_t k = good.size(); k-- > 0;) {
        if (good[k]->purity < threshold) continue;
        if (k + 1 == good.size()) return good[k]->fwhm;
        const auto* lo = good[k];
        const auto* hi = good[k + 1];
        const double t = (lo->purity - threshold) / (lo->purity - hi->purity);
        return lo->fwhm + t * (hi->fwhm - lo->fwhm);
    }
    return std::nullopt;
}

}  // namespace hsps
