#include "hsps/multiplexing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsps/error.hpp"
#include "hsps/kernels/pulse_train.hpp"
#include "hsps/rng.hpp"
#include "lm.hpp"

namespace hsps {

namespace {

void check_unit(double v, const char* name)
{
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("multiplex.") + name + " must be in [0, 1]");
}

/// (q^n - 1) / (q - 1) with q = 1 - r, stable for small r.
double geometric(double r, int n)
{
    if (r == 0.0) return static_cast<double>(n);
    return std::expm1(n * std::log1p(-r)) / -r;
}

}  // namespace

void MultiplexParams::validate() const
{
    if (!(mu >= 0.0)) throw ConfigError("multiplex.mu must be >= 0");
    check_unit(eta_herald, "eta_herald");
    check_unit(eta_sl, "eta_sl");
    if (bins < 1) throw ConfigError("multiplex.bins must be >= 1");
    if (!(pulse_period > 0.0)) throw ConfigError("multiplex.pulse_period_s must be > 0");
    if (dead_head < 0 || dead_tail < 0) throw ConfigError("multiplex.dead_head and multiplex.dead_tail must be >= 0");
}

void ChannelEfficiencies::validate() const
{
    for (auto [v, n] : {std::pair{eta_t, "eta_t"}, {eta_di, "eta_di"}, {eta_ds, "eta_ds"}, {eta_h, "eta_h"},
                        {eta_v, "eta_v"}}) {
        check_unit(v, n);
    }
}

double p_k(double mu, int k)
{
    if (!(mu >= 0.0)) throw DomainError("p_k: mu must be >= 0");
    if (k < 0) throw DomainError("p_k: k must be >= 0");
    return std::pow(mu / (mu + 1.0), k) / (mu + 1.0);
}

double heralded_single_prob(double mu, double eta_herald)
{
    if (!(mu >= 0.0)) throw DomainError("heralded_single_prob: mu must be >= 0");
    if (!(eta_herald >= 0.0 && eta_herald <= 1.0)) throw DomainError("heralded_single_prob: eta outside [0, 1]");
    return mu / ((mu + 1.0) * (mu + 1.0)) * eta_herald;
}

double p_heralded_basic(double p, int n)
{
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p_heralded_basic: p outside [0, 1]");
    if (n < 1) throw DomainError("p_heralded_basic: N must be >= 1");
    return -std::expm1(n * std::log1p(-p));
}

double p_multiplexed_direct(double p1, double eta_sl, int n)
{
    if (n < 1) throw DomainError("p_multiplexed: N must be >= 1");
    // j = N - k runs from 0 (latest bin) upward
    double sum = 0.0;
    double herald_free = 1.0;
    double survive = 1.0 - eta_sl;
    for (int j = 0; j < n; ++j) {
        sum += p1 * herald_free * survive;
        herald_free *= 1.0 - p1;
        survive *= 1.0 - eta_sl;
    }
    return sum;
}

double p_multiplexed(double p1, double eta_sl, int n)
{
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("p_multiplexed: P1 outside [0, 1]");
    if (!(eta_sl >= 0.0 && eta_sl <= 1.0)) throw DomainError("p_multiplexed: eta_sl outside [0, 1]");
    if (n < 1) throw DomainError("p_multiplexed: N must be >= 1");
    const double r = p1 + eta_sl - p1 * eta_sl;  // 1 - q
    const double closed = p1 * (1.0 - eta_sl) * geometric(r, n);
    const double direct = p_multiplexed_direct(p1, eta_sl, n);
    if (std::abs(closed - direct) > 1e-12) {
        std::ostringstream os;
        os << "p_multiplexed: closed form " << closed << " differs from direct sum " << direct;
        throw NumericError(os.str(), std::abs(closed - direct));
    }
    return closed;
}

std::vector<int> allowed_bins(int n, int dead_head, int dead_tail, bool final_bin)
{
    std::vector<int> bins;
    for (int k = dead_head + 1; k <= n - dead_tail; ++k) bins.push_back(k);
    if (final_bin && (bins.empty() || bins.back() != n)) bins.push_back(n);
    return bins;
}

WorkZoneResult p_multiplexed_work_zone(double p1, double eta_sl, int n, int dead_head, int dead_tail,
                                       bool final_bin)
{
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("p_multiplexed_work_zone: P1 outside [0, 1]");
    if (!(eta_sl >= 0.0 && eta_sl <= 1.0)) throw DomainError("p_multiplexed_work_zone: eta_sl outside [0, 1]");
    if (dead_head < 0 || dead_tail < 0) throw DomainError("p_multiplexed_work_zone: dead bins must be >= 0");
    if (n <= dead_head + dead_tail) {
        throw DomainError("p_multiplexed_work_zone: N = " + std::to_string(n) + " must exceed h + t_d = " +
                          std::to_string(dead_head + dead_tail));
    }

    const auto bins = allowed_bins(n, dead_head, dead_tail, final_bin);
    WorkZoneResult out{};
    double herald_free = 1.0;  // no herald in any later allowed bin
    for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
        out.direct += p1 * herald_free * std::pow(1.0 - eta_sl, n - *it + 1);
        herald_free *= 1.0 - p1;
    }

    const double r = p1 + eta_sl - p1 * eta_sl;
    const int window = n - dead_head - dead_tail;
    const double tail = std::pow(1.0 - eta_sl, dead_tail + 1) * geometric(r, window);
    if (final_bin && dead_tail > 0) {
        out.closed = p1 * (1.0 - eta_sl) + p1 * (1.0 - p1) * tail;
    } else {
        out.closed = p1 * tail;
    }
    out.printed = n > 10 ? p1 * (1.0 - eta_sl) + p1 * (1.0 - p1) * std::pow(1.0 - eta_sl, 6) * geometric(r, n - 10)
                         : std::numeric_limits<double>::quiet_NaN();
    return out;
}

SimulationResult simulate_pulse_train(const MultiplexParams& params, std::uint64_t trials, std::uint64_t seed,
                                      bool parallel)
{
    params.validate();
    if (trials < 1) throw DomainError("simulate_pulse_train: trials must be >= 1");
    if (params.bins <= params.dead_head + params.dead_tail && !params.final_bin) {
        throw DomainError("simulate_pulse_train: no allowed bins");
    }
    const auto bins = allowed_bins(params.bins, params.dead_head, params.dead_tail, params.final_bin);
    kernels::PulseTrainInput in{heralded_single_prob(params.mu, params.eta_herald), {}, trials, seed};
    for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
        in.survival.push_back(std::pow(1.0 - params.eta_sl, params.bins - *it + 1));
    }

    SimulationResult r;
    r.trials = trials;
    r.successes = parallel ? kernels::pulse_train_omp(in) : kernels::pulse_train_serial(in);
    r.p_hat = static_cast<double>(r.successes) / static_cast<double>(trials);
    r.std_error = std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(trials));
    return r;
}

double FitResult::value(const std::string& name) const
{
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return values[k];
    throw Error("FitResult: no parameter '" + name + "'");
}

double FitResult::half_width(const std::string& name) const
{
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return half_widths[k];
    throw Error("FitResult: no parameter '" + name + "'");
}

namespace {

double weight(const XyPoint& p)
{
    if (!p.sigma) return 1.0;
    if (!(*p.sigma > 0.0)) throw DataError("fit: standard errors must be > 0");
    return 1.0 / *p.sigma;
}

}  // namespace

FitResult fit_loop_loss(const std::vector<XyPoint>& data)
{
    if (data.size() < 2) throw DataError("fit_loop_loss: need at least 2 points");
    for (const auto& p : data) {
        if (!(p.y > 0.0)) throw DataError("fit_loop_loss: amplitudes must be positive");
        if (!std::isfinite(p.x)) throw DataError("fit_loop_loss: non-finite turn count");
        weight(p);
    }

    // log y = log a + x log(1 - eta_sl)
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        design(k, 0) = 1.0;
        design(k, 1) = data[static_cast<std::size_t>(k)].x;
        rhs(k) = std::log(data[static_cast<std::size_t>(k)].y);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 2) throw FitError("fit_loop_loss: singular design (all turn counts equal)");
    const Eigen::VectorXd lin = qr.solve(rhs);

    const detail::ResidualFn f = [&data](const Eigen::VectorXd& th) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
        for (std::size_t k = 0; k < data.size(); ++k) {
            const auto& p = data[k];
            r(static_cast<Eigen::Index>(k)) = (th(0) * std::pow(1.0 - th(1), p.x) - p.y) * weight(p);
        }
        return r;
    };
    Eigen::VectorXd x0(2);
    x0 << std::exp(lin(0)), -std::expm1(lin(1));
    const auto lm = detail::levenberg_marquardt(f, x0);

    FitResult out;
    out.names = {"a", "eta_sl"};
    out.values = {lm.x(0), lm.x(1)};
    out.fixed = {false, false};
    out.residual_norm = std::sqrt(lm.ssr);
    out.iterations = lm.iterations;
    out.starts = 1;
    out.converged = lm.converged;
    const auto cov = detail::confidence(detail::jacobian(f, lm.x), lm.ssr, static_cast<int>(data.size()) - 2);
    out.identifiable = cov.identifiable;
    out.half_widths = {cov.half_widths(0), cov.half_widths(1)};
    if (!lm.converged) out.message = "refinement stopped at the iteration limit";
    return out;
}

double multiplexed_model(double mu, double eta, double eta_sl, int n, const MultiplexFitOptions& opt)
{
    const double p1 = heralded_single_prob(mu, eta);
    if (opt.model == MultiplexModel::plain) return p_multiplexed(p1, eta_sl, n);
    return p_multiplexed_work_zone(p1, eta_sl, n, opt.dead_head, opt.dead_tail, opt.final_bin).direct;
}

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double v) { return std::log(v / (1.0 - v)); }

}  // namespace

FitResult fit_multiplexed(const std::vector<XyPoint>& data, const MultiplexFitOptions& opt)
{
    const std::array<std::optional<double>, 3> fixed = {opt.fix_mu, opt.fix_eta, opt.fix_eta_sl};
    const std::array<const char*, 3> names = {"mu", "eta", "eta_sl"};
    std::vector<int> free_idx;
    for (int k = 0; k < 3; ++k) {
        if (fixed[k]) {
            if (!(*fixed[k] > 0.0 && *fixed[k] < 1.0)) {
                throw ConfigError(std::string("multiplex.fit: fixed ") + names[k] + " must be in (0, 1)");
            }
        } else {
            free_idx.push_back(k);
        }
    }
    if (free_idx.empty()) throw ConfigError("multiplex.fit: every parameter is fixed");
    if (data.size() < free_idx.size()) {
        throw DataError("fit_multiplexed: " + std::to_string(data.size()) + " points for " +
                        std::to_string(free_idx.size()) + " free parameters");
    }
    std::vector<int> bins;
    for (const auto& p : data) {
        if (!(p.x >= 1.0) || p.x != std::floor(p.x)) throw DataError("fit_multiplexed: N must be a positive integer");
        if (!std::isfinite(p.y)) throw DataError("fit_multiplexed: non-finite probability");
        weight(p);
        bins.push_back(static_cast<int>(p.x));
    }
    if (opt.model == MultiplexModel::work_zone) {
        for (int n : bins)
            if (n <= opt.dead_head + opt.dead_tail) {
                throw DataError("fit_multiplexed: N = " + std::to_string(n) + " not above the dead bins");
            }
    }

    auto natural = [&](const Eigen::VectorXd& u) {
        std::array<double, 3> th{};
        for (int k = 0; k < 3; ++k) th[k] = fixed[k] ? *fixed[k] : 0.0;
        for (std::size_t j = 0; j < free_idx.size(); ++j) th[free_idx[j]] = logistic(u(static_cast<Eigen::Index>(j)));
        return th;
    };
    auto residuals_natural = [&](const std::array<double, 3>& th) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
        for (std::size_t k = 0; k < data.size(); ++k) {
            r(static_cast<Eigen::Index>(k)) =
                (multiplexed_model(th[0], th[1], th[2], bins[k], opt) - data[k].y) * weight(data[k]);
        }
        return r;
    };
    const detail::ResidualFn f = [&](const Eigen::VectorXd& u) { return residuals_natural(natural(u)); };

    const int starts = std::max(1, opt.starts);
    std::vector<Eigen::VectorXd> init(static_cast<std::size_t>(starts));
    const std::array<double, 3> guess = {opt.mu0, opt.eta0, opt.eta_sl0};
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(free_idx.size()));
        PhiloxStream rng(opt.seed, static_cast<std::uint64_t>(s));
        for (std::size_t j = 0; j < free_idx.size(); ++j) {
            const int k = free_idx[j];
            double v = guess[k];
            if (s > 0) {
                const double x = rng.uniform();
                v = k == 0 ? std::pow(10.0, -4.0 + 3.0 * x) : (k == 1 ? 0.05 + 0.9 * x : 0.01 + 0.49 * x);
            }
            u(static_cast<Eigen::Index>(j)) = logit(std::clamp(v, 1e-12, 1.0 - 1e-12));
        }
        init[static_cast<std::size_t>(s)] = u;
    }

    std::vector<detail::LmResult> runs(static_cast<std::size_t>(starts));
    std::vector<std::string> failures(static_cast<std::size_t>(starts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int s = 0; s < starts; ++s) {
        try {
            runs[static_cast<std::size_t>(s)] = detail::levenberg_marquardt(f, init[static_cast<std::size_t>(s)]);
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(s)] = e.what();
            runs[static_cast<std::size_t>(s)].ssr = std::numeric_limits<double>::infinity();
        }
    }

    int best = -1;
    for (int s = 0; s < starts; ++s) {
        const auto& r = runs[static_cast<std::size_t>(s)];
        if (!std::isfinite(r.ssr) || r.x.size() == 0) continue;
        if (best < 0 || r.ssr < runs[static_cast<std::size_t>(best)].ssr) best = s;
    }
    if (best < 0) {
        std::string why;
        for (const auto& m : failures)
            if (!m.empty()) {
                why = m;
                break;
            }
        throw FitError("fit_multiplexed: all " + std::to_string(starts) + " starts failed" +
                       (why.empty() ? std::string() : ": " + why));
    }

    const auto& lm = runs[static_cast<std::size_t>(best)];
    const auto th = natural(lm.x);

    // confidence in natural coordinates over the free subset
    const detail::ResidualFn fn = [&](const Eigen::VectorXd& v) {
        auto t = th;
        for (std::size_t j = 0; j < free_idx.size(); ++j) t[free_idx[j]] = v(static_cast<Eigen::Index>(j));
        return residuals_natural(t);
    };
    Eigen::VectorXd v(static_cast<Eigen::Index>(free_idx.size()));
    for (std::size_t j = 0; j < free_idx.size(); ++j) v(static_cast<Eigen::Index>(j)) = th[free_idx[j]];
    const auto cov = detail::confidence(detail::jacobian(fn, v), lm.ssr,
                                        static_cast<int>(data.size() - free_idx.size()));

    FitResult out;
    out.residual_norm = std::sqrt(lm.ssr);
    out.iterations = lm.iterations;
    out.starts = starts;
    out.converged = lm.converged;
    out.identifiable = cov.identifiable;
    for (int k = 0; k < 3; ++k) {
        out.names.emplace_back(names[k]);
        out.values.push_back(th[k]);
        out.fixed.push_back(fixed[k].has_value());
        out.half_widths.push_back(0.0);
    }
    for (std::size_t j = 0; j < free_idx.size(); ++j) {
        out.half_widths[static_cast<std::size_t>(free_idx[j])] = cov.half_widths(static_cast<Eigen::Index>(j));
    }
    if (!cov.identifiable) {
        out.message = "free parameters are not separately identifiable; only P1 = mu eta / (1 + mu)^2 and "
                      "eta_sl are constrained by the data";
    }
    return out;
}

}  // namespace hsps
