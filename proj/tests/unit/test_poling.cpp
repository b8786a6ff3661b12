#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "hsps/constants.hpp"
#include "hsps/error.hpp"
#include "hsps/poling.hpp"

using namespace hsps;

namespace {

constexpr double kL = 2e-3;
constexpr double kPeriod = 29.4e-6;

CrystalSpec reference_crystal(double length = kL)
{
    CrystalSpec s;
    s.length = length;
    s.model = std::make_shared<const DispersionModel>(ktp_koenig_wong_fradkin());
    return s;
}

// (1/L) integral of g(z) exp(-i dk z), one Gauss rule per domain.
std::complex<double> brute_pmf(const PolingStructure& p, double dk)
{
    using boost::math::quadrature::gauss;
    std::complex<double> acc{};
    for (std::size_t n = 0; n < p.signs.size(); ++n) {
        const double a = p.domain_width * static_cast<double>(n), b = a + p.domain_width;
        const double re = gauss<double, 30>::integrate([&](double z) { return std::cos(dk * z); }, a, b);
        const double im = gauss<double, 30>::integrate([&](double z) { return -std::sin(dk * z); }, a, b);
        acc += static_cast<double>(p.signs[n]) * std::complex<double>(re, im);
    }
    return acc / p.length();
}

double purity_of(const PolingStructure& p, const CrystalSpec& s, const PumpSpec& pump)
{
    const auto grid = poling_grid(s, pump, 256);
    return purity_from_pmf(s, pump, [&](double dk) { return discrete_pmf(p, dk); }, grid);
}

}  // namespace

TEST_CASE("closed-form PMF equals piecewise integration on random structures")
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> count(1, 200);
    std::uniform_real_distribution<double> width(5e-6, 20e-6);
    std::uniform_real_distribution<double> dk(-3e5, 6e5);
    for (int t = 0; t < 100; ++t) {
        PolingStructure p;
        p.domain_width = width(rng);
        p.signs.resize(static_cast<std::size_t>(count(rng)));
        for (auto& s : p.signs) s = coin(rng) ? 1 : -1;
        for (int k = 0; k < 3; ++k) {
            const double d = dk(rng);
            const auto a = discrete_pmf(p, d), b = brute_pmf(p, d);
            CHECK(std::abs(a - b) <= 1e-10);
        }
    }
}

TEST_CASE("periodic structure: alternating signs and 2/pi efficiency at the grating vector")
{
    const auto p = periodic_structure(kL, kPeriod);
    CHECK(p.domains() == 136);
    CHECK(p.domain_width == kPeriod / 2);
    for (std::size_t n = 0; n < p.domains(); ++n) CHECK(p.signs[n] == (n % 2 == 0 ? 1 : -1));
    CHECK(std::abs(discrete_pmf(p, 2 * M_PI / kPeriod)) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    // uniform orientation at dk = 0 gives 1
    auto u = p;
    std::fill(u.signs.begin(), u.signs.end(), 1);
    CHECK(std::abs(discrete_pmf(u, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("infinitely wide target gives the periodic structure")
{
    const auto p = optimize_domains(kL, kPeriod, INFINITY);
    const auto q = periodic_structure(kL, kPeriod);
    CHECK(p.signs == q.signs);
    CHECK(target_pmf(kL, kL, INFINITY, kPeriod) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(target_pmf(0.0, kL, kL / 8, kPeriod) == 0.0);
}

TEST_CASE("partial sums up to the full count equal the full PMF")
{
    const auto p = optimize_domains(kL, kPeriod, kL / 8);
    const double k = 2 * M_PI / kPeriod;
    CHECK(partial_pmf(p, k, p.domains()) == discrete_pmf(p, k));
    CHECK(partial_pmf(p, k, 0) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("slope-feasible scaling tracks the target within one domain")
{
    OptimizeReport rep;
    (void)optimize_domains(kL, kPeriod, kL / 4, TargetScaling::slope_feasible, &rep);
    CHECK(rep.scale <= rep.end_scale);
    CHECK(rep.max_deviation <= rep.domain_increment);
}

TEST_CASE("end-amplitude scaling ends on the periodic amplitude")
{
    OptimizeReport rep;
    const auto p = optimize_domains(kL, kPeriod, kL / 8, TargetScaling::end_amplitude, &rep);
    CHECK(rep.scale == rep.end_scale);
    const double k = 2 * M_PI / kPeriod;
    const double target_end = rep.scale * target_pmf(p.length(), p.length(), kL / 8, kPeriod);
    // the rescaled target ends on the periodic first-order amplitude
    CHECK(target_end == doctest::Approx(std::abs(discrete_pmf(periodic_structure(p.length(), kPeriod), k))).epsilon(1e-12));
    CHECK(parse_target_scaling("slope_feasible") == TargetScaling::slope_feasible);
    CHECK_THROWS_AS(parse_target_scaling("bogus"), ConfigError);
}

TEST_CASE("optimized structure suppresses side lobes")
{
    const auto per = periodic_structure(kL, kPeriod);
    const auto opt = optimize_domains(kL, kPeriod, kL / 8);
    std::vector<double> dk;
    const double k0 = 2 * M_PI / kPeriod;
    for (int n = -4000; n <= 4000; ++n) dk.push_back(k0 + 15.0 * n);
    const double sp = side_lobe_level_db(pmf_curve(per, dk));
    const double so = side_lobe_level_db(pmf_curve(opt, dk));
    // uniform sinc lobe is -13.26 dB; the single-domain factor tilts the
    // envelope by ~2% across the lobe, lifting the low-side lobe ~0.18 dB
    CHECK(std::abs(sp + 13.26) < 0.25);
    CHECK(so < sp - 0.5);
}

TEST_CASE("structure file round trip")
{
    const auto p = optimize_domains(kL, kPeriod, kL / 8);
    std::stringstream ss;
    write_structure(ss, p);
    const auto q = read_structure(ss);
    CHECK(q.signs == p.signs);
    CHECK(q.domain_width == p.domain_width);
    CHECK(q.period == p.period);
    CHECK(q.sigma == p.sigma);

    std::stringstream bad("hsps-poling 1\ndomain_width_m 1e-5\n");
    CHECK_THROWS_AS(read_structure(bad), DataError);
}

TEST_CASE("optimized crystal is purer than the periodic one for the 12 nm pump")
{
    const auto s = reference_crystal();
    PumpSpec pump;
    const double pp = purity_of(periodic_structure(kL, kPeriod), s, pump);
    const double po = purity_of(optimize_domains(kL, kPeriod, kL / 8), s, pump);
    CHECK(po > pp);
}

TEST_CASE("purity landscape: optimized at least periodic in the broad-pump region")
{
    const auto s = reference_crystal();
    PumpSpec pump;
    const std::vector<double> fwhm = {4e-9, 8e-9, 12e-9}, len = {1e-3, 2e-3, 3e-3, 4e-3};
    const auto per = purity_landscape(s, pump, fwhm, len, StructureKind::periodic);
    const auto opt = purity_landscape(s, pump, fwhm, len, StructureKind::optimized);
    for (Eigen::Index i = 0; i < per.purity.rows(); ++i) {
        for (Eigen::Index j = 0; j < per.purity.cols(); ++j) {
            CAPTURE(fwhm[static_cast<std::size_t>(i)]);
            CAPTURE(len[static_cast<std::size_t>(j)]);
            CHECK(per.cell_errors[static_cast<std::size_t>(i * 4 + j)].empty());
            CHECK(opt.purity(i, j) >= per.purity(i, j));
        }
    }
    // narrower pump, purer state at 2 mm
    CHECK(per.purity(0, 1) > per.purity(2, 1));
}

TEST_CASE("landscape flags cells outside the dispersion window")
{
    const auto s = reference_crystal();
    PumpSpec pump;
    const auto l = purity_landscape(s, pump, {16e-9}, {2e-3}, StructureKind::periodic);
    CHECK_FALSE(l.cell_errors[0].empty());
    CHECK(std::isnan(l.purity(0, 0)));
}
