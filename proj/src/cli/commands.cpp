#include "hsps/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hsps/constants.hpp"
#include "hsps/error.hpp"
#include "hsps/io.hpp"

#ifndef HSPS_VERSION
#define HSPS_VERSION "unknown"
#endif

namespace hsps::cli {

using nlohmann::json;
using io::format_double;

namespace {

constexpr double c0 = constants::speed_of_light;

/// NaN and infinities become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Setup {
    CrystalSpec spec;
    PumpSpec pump;
    BeamGeometry geom;
    MatchedPair matched;
};

Setup setup(const config::RunConfig& cfg)
{
    Setup s{cfg.crystal_spec(), cfg.pump, cfg.beam_geometry(), {}};
    s.matched = matched_frequencies(s.spec, s.pump.omega0());
    return s;
}

json crystal_metadata(const Setup& s)
{
    const auto xi = s.geom.focal_parameters(s.spec, s.matched.omega_s, s.matched.omega_i);
    const auto w = s.geom.waists(s.spec, s.matched.omega_s, s.matched.omega_i);
    return {{"dispersion_model", s.spec.model->name()},
            {"dispersion_source", s.spec.model->source()},
            {"matched_lambda_s_m", constants::wavelength_from_omega(s.matched.omega_s)},
            {"matched_lambda_i_m", constants::wavelength_from_omega(s.matched.omega_i)},
            {"focal_parameters", {xi[0], xi[1], xi[2]}},
            {"waists_m", {w[0], w[1], w[2]}},
            {"beams_given_as", s.geom.kind() == BeamGeometry::Kind::waists ? "waists" : "focal"},
            {"pump_fwhm_semantics",
             "intensity FWHM; sigma_omega = FWHM_omega / (2 sqrt(2 ln 2)); "
             "FWHM_omega = 2 pi c FWHM_lambda / lambda0^2"}};
}

}  // namespace

void OutputSink::write(const std::string& name, std::string_view bytes)
{
    io::write_file(dir_ / name, bytes);
    records_.push_back({name, bytes.size(), io::hex64(io::fnv1a64(bytes))});
}

void cmd_jsa(const config::RunConfig& cfg, OutputSink& out)
{
    const auto s = setup(cfg);
    const auto grid = default_grid(s.spec, s.pump, cfg.grid.points, cfg.grid.span_fwhm);
    const auto res = compute_jsa(s.spec, s.pump, s.geom, grid);
    const auto report = approximation_report(res);

    const auto rows = static_cast<Eigen::Index>(grid.rows()), cols = static_cast<Eigen::Index>(grid.cols());
    Eigen::MatrixXd jsi = res.psi.cwiseAbs2();
    Eigen::MatrixXd envelope(rows, cols), phi_abs(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double ws = grid.omega_s[static_cast<std::size_t>(i)], wi = grid.omega_i[static_cast<std::size_t>(j)];
            envelope(i, j) = pump_amplitude(s.pump, ws, wi);
            phi_abs(i, j) = std::abs(phase_mismatch(s.spec, ws, wi).phi);
        }
    }

    io::Table axes{{"index", "omega_s_rad_per_s", "lambda_s_m", "omega_i_rad_per_s", "lambda_i_m"}, {}};
    for (std::size_t k = 0; k < std::max(grid.rows(), grid.cols()); ++k) {
        const bool hs = k < grid.rows(), hi = k < grid.cols();
        axes.add({fmt(k), hs ? fmt(grid.omega_s[k]) : "", hs ? fmt(constants::wavelength_from_omega(grid.omega_s[k])) : "",
                  hi ? fmt(grid.omega_i[k]) : "", hi ? fmt(constants::wavelength_from_omega(grid.omega_i[k])) : ""});
    }

    out.write("jsa_jsi.csv", io::matrix_csv(jsi));
    out.write("jsa_pump_envelope.csv", io::matrix_csv(envelope));
    out.write("jsa_phi_abs.csv", io::matrix_csv(phi_abs));
    out.write("jsa_axes.csv", axes.to_csv());
    if (cfg.io.complex_jsa) {
        out.write("jsa_re.csv", io::matrix_csv(res.psi.real()));
        out.write("jsa_im.csv", io::matrix_csv(res.psi.imag()));
    }

    const auto& d = res.diagnostics;
    json diag = {{"grid", {{"rows", grid.rows()}, {"cols", grid.cols()}, {"span_fwhm", cfg.grid.span_fwhm}}},
                 {"max_abs_c", num(d.max_abs_c)},
                 {"spread_a_plus", num(d.spread_a_plus)},
                 {"spread_b_plus", num(d.spread_b_plus)},
                 {"spread_xi", num(d.spread_xi)},
                 {"central_a_plus", num(d.central_a_plus)},
                 {"central_b_plus", num(d.central_b_plus)},
                 {"central_xi", num(d.central_xi)},
                 {"support_points", d.support_points},
                 {"approximation_valid", report.valid},
                 {"c_threshold", report.c_threshold},
                 {"spread_threshold", report.spread_threshold},
                 {"max_jsi", num(jsi.maxCoeff())},
                 {"metadata", crystal_metadata(s)}};
    out.write("jsa_diagnostics.json", dump(diag));
}

void cmd_heralding(const config::RunConfig& cfg, HeraldingSweepKind kind, OutputSink& out)
{
    const auto s = setup(cfg);
    const auto& h = cfg.heralding;
    json summary = {{"metadata", crystal_metadata(s)}};

    const std::vector<std::string> cols = {"lambda_s_m", "lambda_i_m", "xi_p", "xi_s", "xi_i",
                                           "eta_s", "eta_i", "eta_c", "ok", "error"};
    auto sweep_table = [&](const HeraldingSweep& sw) {
        io::Table t{cols, {}};
        std::vector<std::string> err(sw.rows.size());
        for (const auto& e : sw.errors) err[e.index] = e.message;
        for (std::size_t k = 0; k < sw.rows.size(); ++k) {
            const auto& r = sw.rows[k];
            t.add({fmt(constants::wavelength_from_omega(r.omega_s)), fmt(constants::wavelength_from_omega(r.omega_i)),
                   fmt(r.xi_p), fmt(r.xi_s), fmt(r.xi_i), fmt(r.eta_s), fmt(r.eta_i), fmt(r.eta_c),
                   sw.ok[k] ? "1" : "0", err[k]});
        }
        return t.to_csv();
    };
    auto argmax_json = [](const HeraldingSweep& sw) -> json {
        if (!sw.argmax) return nullptr;
        const auto& r = sw.rows[*sw.argmax];
        return {{"index", *sw.argmax}, {"eta_c", r.eta_c}, {"eta_s", r.eta_s}, {"eta_i", r.eta_i},
                {"xi_p", r.xi_p}, {"xi_s", r.xi_s}, {"xi_i", r.xi_i},
                {"lambda_s_m", constants::wavelength_from_omega(r.omega_s)}};
    };

    if (kind != HeraldingSweepKind::focal) {
        const auto sw = sweep_heralding_wavelength(s.spec, s.pump, s.geom, h.lambda_min, h.lambda_max, h.points);
        out.write("heralding_wavelength.csv", sweep_table(sw));
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t k = 0; k < sw.rows.size(); ++k)
            if (sw.ok[k]) {
                lo = std::min(lo, sw.rows[k].eta_c);
                hi = std::max(hi, sw.rows[k].eta_c);
            }
        summary["wavelength"] = {{"argmax", argmax_json(sw)}, {"eta_c_min", num(lo)}, {"eta_c_max", num(hi)},
                                 {"failed_points", sw.errors.size()}, {"note", sw.note}};
    }

    if (kind != HeraldingSweepKind::wavelength) {
        const auto sw = sweep_heralding_focal(s.spec, s.pump, s.matched.omega_s, s.matched.omega_i, h.focal_values,
                                              h.focal_values, h.focal_values, h.focal_mode);
        out.write("heralding_focal.csv", sweep_table(sw));
        summary["focal"] = {{"argmax", argmax_json(sw)}, {"failed_points", sw.errors.size()}, {"note", sw.note}};

        const auto grid = focal_scan_grid(s.spec, s.pump, h.jsi_grid_points, h.jsi_span_fwhm);
        const auto jt = max_jsi_over_focal(s.spec, s.pump, h.focal_values, grid, h.jsi_triples);
        io::Table t{{"xi_p", "xi_s", "xi_i", "max_jsi", "lambda_s_m", "lambda_i_m", "ok", "error"}, {}};
        std::vector<std::string> err(jt.rows.size());
        for (const auto& e : jt.errors) err[e.index] = e.message;
        for (std::size_t k = 0; k < jt.rows.size(); ++k) {
            const auto& r = jt.rows[k];
            t.add({fmt(r.xi_p), fmt(r.xi_s), fmt(r.xi_i), fmt(r.max_jsi),
                   jt.ok[k] ? fmt(constants::wavelength_from_omega(r.omega_s)) : "",
                   jt.ok[k] ? fmt(constants::wavelength_from_omega(r.omega_i)) : "", jt.ok[k] ? "1" : "0", err[k]});
        }
        out.write("heralding_max_jsi.csv", t.to_csv());
        json am = nullptr;
        if (jt.argmax) {
            const auto& r = jt.rows[*jt.argmax];
            am = {{"index", *jt.argmax}, {"xi_p", r.xi_p}, {"xi_s", r.xi_s}, {"xi_i", r.xi_i}, {"max_jsi", r.max_jsi}};
        }
        summary["max_jsi"] = {{"argmax", am}, {"failed_points", jt.errors.size()}};
    }
    out.write("heralding_argmax.json", dump(summary));
}

void cmd_purity(const config::RunConfig& cfg, OutputSink& out)
{
    const auto s = setup(cfg);
    const auto& f = cfg.filters;
    const auto grid = default_grid(s.spec, s.pump, cfg.grid.points, cfg.grid.span_fwhm);
    const auto base = compute_jsa(s.spec, s.pump, s.geom, grid);
    const auto schmidt = schmidt_decompose(base);

    FilterSpec ts{f.shape, f.signal_center.value_or(constants::wavelength_from_omega(s.matched.omega_s)), INFINITY};
    FilterSpec ti{f.shape, f.idler_center.value_or(constants::wavelength_from_omega(s.matched.omega_i)), INFINITY};
    const auto rows = f.resample
                          ? purity_filter_sweep_resampled(s.spec, s.pump, s.geom, base, f.fwhm_values, ts, ti,
                                                          ResampleOptions{f.resample_points, f.gaussian_span})
                          : purity_filter_sweep(base, f.fwhm_values, ts, ti);

    io::Table t{{"fwhm_m", "purity", "schmidt_number", "he_s", "he_i", "ok", "error"}, {}};
    for (const auto& r : rows) {
        t.add({fmt(r.fwhm), fmt(r.purity), r.ok ? fmt(1.0 / r.purity) : "nan", fmt(r.he_s), fmt(r.he_i),
               r.ok ? "1" : "0", r.message});
    }
    out.write("purity_sweep.csv", t.to_csv());

    io::Table lam{{"mode", "lambda"}, {}};
    for (std::size_t k = 0; k < schmidt.lambdas.size() && k < 50; ++k) lam.add({fmt(k), fmt(schmidt.lambdas[k])});
    out.write("purity_schmidt.csv", lam.to_csv());

    const auto crossing = purity_crossing(rows, f.threshold);
    json summary = {{"unfiltered_purity", schmidt.purity},
                    {"unfiltered_schmidt_number", schmidt.schmidt_number},
                    {"unfiltered_rank", schmidt.rank},
                    {"threshold", f.threshold},
                    {"crossing_fwhm_m", crossing ? json(*crossing) : json(nullptr)},
                    {"filter_shape", to_string(f.shape)},
                    {"filter_center_s_m", ts.center_wavelength},
                    {"filter_center_i_m", ti.center_wavelength},
                    {"resampled", f.resample},
                    {"metadata", crystal_metadata(s)}};
    out.write("purity_summary.json", dump(summary));
}

namespace {

std::string structure_text(const PolingStructure& p)
{
    std::ostringstream os;
    write_structure(os, p);
    return os.str();
}

std::vector<double> pmf_axis(const config::RunConfig& cfg, double period)
{
    const double k0 = constants::two_pi / period;
    const auto n = cfg.poling.pmf_points;
    std::vector<double> dk(n);
    for (std::size_t k = 0; k < n; ++k) {
        dk[k] = k0 + cfg.poling.pmf_half_width * (2.0 * static_cast<double>(k) / static_cast<double>(n - 1) - 1.0);
    }
    return dk;
}

json structure_summary(const PolingStructure& p, const PmfCurve& curve, double purity)
{
    return {{"domains", p.domains()},
            {"domain_width_m", p.domain_width},
            {"length_m", p.length()},
            {"purity", num(purity)},
            {"side_lobe_db", num(side_lobe_level_db(curve))}};
}

}  // namespace

void cmd_poling(const config::RunConfig& cfg, PolingAction action, OutputSink& out)
{
    const auto spec = cfg.crystal_spec();
    const auto& pc = cfg.poling;
    const double period = spec.period;

    auto purity_of = [&](const PolingStructure& p, const CrystalSpec& sp) {
        const auto grid = poling_grid(sp, cfg.pump, pc.grid_points, pc.pump_span);
        return purity_from_pmf(sp, cfg.pump, [&p](double dk) { return discrete_pmf(p, dk); }, grid);
    };

    auto compare = [&](const PolingStructure& candidate, const CrystalSpec& sp, const std::string& prefix,
                       json summary) {
        const auto periodic = periodic_structure(candidate.length(), period);
        const auto dk = pmf_axis(cfg, period);
        const auto c_per = pmf_curve(periodic, dk), c_opt = pmf_curve(candidate, dk);
        io::Table t{{"delta_k_rad_per_m", "abs_pmf_periodic", "abs_pmf_structure"}, {}};
        for (std::size_t k = 0; k < dk.size(); ++k) {
            t.add({fmt(dk[k]), fmt(std::abs(c_per.values[k]) / c_per.normalization),
                   fmt(std::abs(c_opt.values[k]) / c_opt.normalization)});
        }
        out.write(prefix + "_pmf.csv", t.to_csv());
        const double p_per = purity_of(periodic, sp), p_opt = purity_of(candidate, sp);
        summary["periodic"] = structure_summary(periodic, c_per, p_per);
        summary["structure"] = structure_summary(candidate, c_opt, p_opt);
        summary["purity_gain"] = num(p_opt - p_per);
        summary["pump_fwhm_m"] = cfg.pump.fwhm;
        out.write(prefix + "_summary.json", dump(summary));
    };

    switch (action) {
    case PolingAction::optimize: {
        OptimizeReport rep;
        const double sigma = pc.sigma_fraction * spec.length;
        const auto p = optimize_domains(spec.length, period, sigma, pc.scaling, &rep);
        out.write("poling_structure.txt", structure_text(p));
        compare(p, spec, "poling_optimize",
                {{"sigma_m", sigma},
                 {"scaling", to_string(pc.scaling)},
                 {"scale", rep.scale},
                 {"end_scale", rep.end_scale},
                 {"slope_scale", rep.slope_scale},
                 {"max_deviation", rep.max_deviation},
                 {"domain_increment", rep.domain_increment}});
        break;
    }
    case PolingAction::evaluate: {
        if (pc.structure_file.empty()) throw ConfigError("poling.structure_file: required for 'poling evaluate'");
        std::ifstream is(pc.structure_file);
        if (!is) throw ConfigError("poling.structure_file: cannot read '" + pc.structure_file + "'");
        const auto p = read_structure(is);
        auto sp = spec;
        sp.length = p.length();
        compare(p, sp, "poling_evaluate", {{"structure_file", pc.structure_file}});
        break;
    }
    case PolingAction::landscape: {
        LandscapeOptions opt{pc.grid_points, pc.sigma_fraction, pc.scaling};
        const auto per = purity_landscape(spec, cfg.pump, pc.landscape_pump_fwhm, pc.landscape_length,
                                          StructureKind::periodic, opt);
        const auto optd = purity_landscape(spec, cfg.pump, pc.landscape_pump_fwhm, pc.landscape_length,
                                           StructureKind::optimized, opt);
        io::Table t{{"pump_fwhm_m", "length_m", "purity_periodic", "purity_optimized", "gain", "error"}, {}};
        const std::size_t nl = pc.landscape_length.size();
        for (std::size_t r = 0; r < pc.landscape_pump_fwhm.size(); ++r) {
            for (std::size_t c = 0; c < nl; ++c) {
                const auto i = static_cast<Eigen::Index>(r), j = static_cast<Eigen::Index>(c);
                std::string err = per.cell_errors[r * nl + c];
                if (err.empty()) err = optd.cell_errors[r * nl + c];
                t.add({fmt(pc.landscape_pump_fwhm[r]), fmt(pc.landscape_length[c]), fmt(per.purity(i, j)),
                       fmt(optd.purity(i, j)), fmt(optd.purity(i, j) - per.purity(i, j)), err});
            }
        }
        out.write("poling_landscape.csv", t.to_csv());
        break;
    }
    }
}

void cmd_multiplex(const config::RunConfig& cfg, MultiplexAction action, OutputSink& out)
{
    const auto& m = cfg.multiplex;
    const auto& p = m.params;
    const double p1 = heralded_single_prob(p.mu, p.eta_herald);
    const json params = {{"mu", p.mu},           {"eta_herald", p.eta_herald}, {"eta_sl", p.eta_sl},
                         {"bins", p.bins},       {"pulse_period_s", p.pulse_period},
                         {"dead_head", p.dead_head}, {"dead_tail", p.dead_tail}, {"final_bin", p.final_bin},
                         {"p1", p1}};

    switch (action) {
    case MultiplexAction::model: {
        const double baseline = p1 * (1.0 - p.eta_sl);
        io::Table t{{"n", "p1", "p_basic", "p_multiplexed", "work_zone_direct", "work_zone_closed",
                     "work_zone_printed", "baseline"},
                    {}};
        json crossing = nullptr;
        for (int n = m.n_min; n <= m.n_max; ++n) {
            double d = NAN, c = NAN, pr = NAN;
            if (n > p.dead_head + p.dead_tail) {
                const auto w = p_multiplexed_work_zone(p1, p.eta_sl, n, p.dead_head, p.dead_tail, p.final_bin);
                d = w.direct;
                c = w.closed;
                pr = w.printed;
                if (crossing.is_null() && d > baseline) crossing = n;
            }
            t.add({fmt(n), fmt(p1), fmt(p_heralded_basic(p1, n)), fmt(p_multiplexed(p1, p.eta_sl, n)), fmt(d), fmt(c),
                   fmt(pr), fmt(baseline)});
        }
        out.write("multiplex_model.csv", t.to_csv());
        out.write("multiplex_model.json",
                  dump({{"params", params},
                        {"baseline", baseline},
                        {"first_n_above_baseline", crossing},
                        {"first_valid_n", p.dead_head + p.dead_tail + 1}}));
        break;
    }
    case MultiplexAction::simulate: {
        const auto r = simulate_pulse_train(p, m.trials, m.seed);
        double analytic = NAN;
        if (p.bins > p.dead_head + p.dead_tail) {
            analytic = p_multiplexed_work_zone(p1, p.eta_sl, p.bins, p.dead_head, p.dead_tail, p.final_bin).direct;
        }
        out.write("multiplex_simulation.json",
                  dump({{"params", params},
                        {"trials", r.trials},
                        {"seed", m.seed},
                        {"successes", r.successes},
                        {"p_hat", r.p_hat},
                        {"stderr", r.std_error},
                        {"analytic", num(analytic)},
                        {"z", num(r.std_error > 0 ? (r.p_hat - analytic) / r.std_error : NAN)}}));
        break;
    }
    case MultiplexAction::fit: {
        if (m.fit.data_file.empty()) throw ConfigError("multiplex.fit.data_file: required for 'multiplex fit'");
        const auto data = io::read_xy_csv(m.fit.data_file);
        const bool loop = m.fit.kind == "loop_loss";
        const auto opt = m.fit_options();
        const auto fr = loop ? fit_loop_loss(data) : fit_multiplexed(data, opt);

        io::Table t{{"x", "y", "model", "residual"}, {}};
        for (const auto& pt : data) {
            double y = 0.0;
            if (loop) {
                y = fr.value("a") * std::pow(1.0 - fr.value("eta_sl"), pt.x);
            } else {
                y = multiplexed_model(fr.value("mu"), fr.value("eta"), fr.value("eta_sl"), static_cast<int>(pt.x), opt);
            }
            t.add({fmt(pt.x), fmt(pt.y), fmt(y), fmt(pt.y - y)});
        }
        out.write("multiplex_fit_curve.csv", t.to_csv());

        json est = json::object();
        for (std::size_t k = 0; k < fr.names.size(); ++k) {
            est[fr.names[k]] = {{"value", fr.values[k]}, {"half_width_95", num(fr.half_widths[k])}, {"fixed", static_cast<bool>(fr.fixed[k])}};
        }
        json j = {{"kind", m.fit.kind},
                  {"data_file", m.fit.data_file},
                  {"points", data.size()},
                  {"estimates", est},
                  {"residual_norm", fr.residual_norm},
                  {"iterations", fr.iterations},
                  {"starts", fr.starts},
                  {"converged", fr.converged},
                  {"identifiable", fr.identifiable},
                  {"message", fr.message}};
        if (!loop) {
            j["p1"] = heralded_single_prob(fr.value("mu"), fr.value("eta"));
            j["model"] = opt.model == MultiplexModel::plain ? "plain" : "work_zone";
            j["seed"] = opt.seed;
        }
        out.write("multiplex_fit.json", dump(j));
        break;
    }
    }
}

std::string manifest_json(const config::RunConfig& cfg, const ManifestInfo& info,
                          const std::vector<OutputRecord>& outputs)
{
    const auto resolved = config::serialize(cfg);
    json files = json::array();
    for (const auto& r : outputs) files.push_back({{"file", r.file}, {"bytes", r.bytes}, {"fnv1a64", r.fnv1a64}});
    json j = {{"toolkit", "hsps"},
              {"version", HSPS_VERSION},
              {"command", info.command},
              {"config_hash", io::hex64(io::fnv1a64(resolved))},
              {"started_utc", info.started_utc},
              {"finished_utc", info.finished_utc},
              {"threads", info.threads},
              {"outputs", files},
              {"resolved_config", json::parse(resolved)}};
    return dump(j);
}

}  // namespace hsps::cli
