#include "hsps/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "hsps/error.hpp"
#include "hsps/io.hpp"

namespace hsps::config {

using nlohmann::json;

namespace {

/// Object view that remembers which keys were read, so leftovers can be rejected.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string key_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const char* key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const char* key, double& out)
    {
        if (auto v = find(key)) out = as_number(*v, key);
    }

    void optional_number(const char* key, std::optional<double>& out)
    {
        if (auto v = find(key)) {
            if (v->is_null()) out.reset();
            else out = as_number(*v, key);
        }
    }

    void integer(const char* key, int& out)
    {
        if (auto v = find(key)) {
            if (!v->is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
            out = v->get<int>();
        }
    }

    void count(const char* key, std::size_t& out)
    {
        if (auto v = find(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                throw ConfigError(key_path(key) + ": expected a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void u64(const char* key, std::uint64_t& out)
    {
        if (auto v = find(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
                throw ConfigError(key_path(key) + ": expected a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const char* key, bool& out)
    {
        if (auto v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(key_path(key) + ": expected true or false");
            out = v->get<bool>();
        }
    }

    void string(const char* key, std::string& out)
    {
        if (auto v = find(key)) {
            if (!v->is_string()) throw ConfigError(key_path(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }

    /// Either an explicit list or {"min", "max", "points", "spacing": "linear" | "log"}.
    void number_list(const char* key, std::vector<double>& out)
    {
        auto v = find(key);
        if (!v) return;
        const auto where = key_path(key);
        if (v->is_array()) {
            out.clear();
            for (const auto& e : *v) out.push_back(as_number(e, key));
            return;
        }
        if (!v->is_object()) throw ConfigError(where + ": expected a list or a range object");
        Section r(*v, where);
        double lo = 0.0, hi = 0.0;
        std::size_t n = 0;
        std::string spacing = "linear";
        if (!r.has("min") || !r.has("max") || !r.has("points")) {
            throw ConfigError(where + ": a range needs min, max and points");
        }
        r.number("min", lo);
        r.number("max", hi);
        r.count("points", n);
        r.string("spacing", spacing);
        r.finish();
        if (n < 1 || !(hi >= lo)) throw ConfigError(where + ": range needs points >= 1 and max >= min");
        if (spacing != "linear" && spacing != "log") {
            throw ConfigError(where + ".spacing: expected 'linear' or 'log', got '" + spacing + "'");
        }
        if (spacing == "log" && !(lo > 0.0)) throw ConfigError(where + ": log spacing needs min > 0");
        out.clear();
        for (std::size_t k = 0; k < n; ++k) {
            const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
            out.push_back(spacing == "linear" ? lo + (hi - lo) * t
                                              : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * t));
        }
        if (n > 1) out.back() = hi;
    }

    /// Calls `fn(Section&)` on a nested object when present.
    template <class Fn>
    void object(const char* key, Fn&& fn)
    {
        if (auto v = find(key)) {
            Section s(*v, key_path(key));
            fn(s);
            s.finish();
        }
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(key_path(it.key().c_str()) + ": unknown key");
        }
    }

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

private:
    double as_number(const json& v, const char* key) const
    {
        if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
        return v.get<double>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class E>
E parse_enum(const std::string& where, const std::string& value,
             std::initializer_list<std::pair<const char*, E>> options)
{
    std::string allowed;
    for (const auto& [name, e] : options) {
        if (value == name) return e;
        allowed += allowed.empty() ? "" : ", ";
        allowed += name;
    }
    throw ConfigError(where + ": expected one of " + allowed + ", got '" + value + "'");
}

const char* name_of(FocalMode m) { return m == FocalMode::symmetric ? "symmetric" : "full"; }
const char* name_of(FocalTriples t) { return t == FocalTriples::constrained ? "constrained" : "full"; }
const char* name_of(MultiplexModel m) { return m == MultiplexModel::plain ? "plain" : "work_zone"; }

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n - 1);
        v[k] = lo + (hi - lo) * t;
    }
    v.back() = hi;
    return v;
}

void parse_multiplex_params(Section& s, MultiplexParams& p)
{
    s.number("mu", p.mu);
    s.number("eta_herald", p.eta_herald);
    s.number("eta_sl", p.eta_sl);
    s.integer("bins", p.bins);
    s.number("pulse_period_s", p.pulse_period);
    s.integer("dead_head", p.dead_head);
    s.integer("dead_tail", p.dead_tail);
    s.boolean("final_bin", p.final_bin);
}

json dump_multiplex_params(const MultiplexParams& p)
{
    return {{"mu", p.mu},
            {"eta_herald", p.eta_herald},
            {"eta_sl", p.eta_sl},
            {"bins", p.bins},
            {"pulse_period_s", p.pulse_period},
            {"dead_head", p.dead_head},
            {"dead_tail", p.dead_tail},
            {"final_bin", p.final_bin}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

DispersionEntry parse_dispersion(Section& s)
{
    DispersionEntry e;
    s.string("source", e.source);
    s.number("lambda_min_m", e.lambda_min);
    s.number("lambda_max_m", e.lambda_max);
    const auto* axes = s.find("axes");
    if (!axes || !axes->is_object() || axes->empty()) {
        throw ConfigError(s.key_path("axes") + ": expected a non-empty object");
    }
    for (auto it = axes->begin(); it != axes->end(); ++it) {
        Section a(it.value(), s.key_path("axes") + "." + it.key());
        AxisDispersion ax;
        a.number("a", ax.a);
        a.number("d_um2", ax.d);
        if (const auto* terms = a.find("terms")) {
            if (!terms->is_array()) throw ConfigError(a.key_path("terms") + ": expected a list");
            std::size_t idx = 0;
            for (const auto& t : *terms) {
                Section ts(t, a.key_path("terms") + "[" + std::to_string(idx++) + "]");
                SellmeierTerm term;
                std::string kind = "resonance";
                ts.string("kind", kind);
                term.kind = parse_enum<SellmeierTerm::Kind>(ts.key_path("kind"), kind,
                                                            {{"resonance", SellmeierTerm::Kind::resonance},
                                                             {"pole", SellmeierTerm::Kind::pole}});
                ts.number("b", term.b);
                ts.number("c_um2", term.c);
                ts.finish();
                ax.terms.push_back(term);
            }
        }
        a.object("thermo", [&](Section& t) {
            ThermoOptic th;
            t.number("reference_temperature_c", th.reference_temperature);
            t.number_list("coefficients", th.coefficients);
            ax.thermo = th;
        });
        a.finish();
        e.axes[it.key()] = ax;
    }
    return e;
}

json dump_dispersion(const DispersionEntry& e)
{
    json axes = json::object();
    for (const auto& [name, ax] : e.axes) {
        json terms = json::array();
        for (const auto& t : ax.terms) {
            terms.push_back({{"kind", t.kind == SellmeierTerm::Kind::resonance ? "resonance" : "pole"},
                             {"b", t.b},
                             {"c_um2", t.c}});
        }
        json a = {{"a", ax.a}, {"d_um2", ax.d}, {"terms", terms}};
        if (ax.thermo) {
            a["thermo"] = {{"reference_temperature_c", ax.thermo->reference_temperature},
                           {"coefficients", ax.thermo->coefficients}};
        }
        axes[name] = a;
    }
    return {{"source", e.source}, {"lambda_min_m", e.lambda_min}, {"lambda_max_m", e.lambda_max}, {"axes", axes}};
}

}  // namespace

std::map<std::string, MultiplexParams> builtin_presets()
{
    std::map<std::string, MultiplexParams> out;
    out["fitted_source"] = MultiplexParams{};  // mu 6e-3, eta 0.31, eta_sl 0.067, 40 bins, 13 ns, 5 + 5 dead
    MultiplexParams loop;
    loop.eta_sl = 0.063;
    out["loop_loss_measured"] = loop;
    return out;
}

std::shared_ptr<const DispersionModel> builtin_dispersion(std::string_view name)
{
    if (name == "ktp_kw_fradkin") return std::make_shared<const DispersionModel>(ktp_koenig_wong_fradkin());
    if (name == "ktp_kato2002") return std::make_shared<const DispersionModel>(ktp_kato_takaoka());
    return nullptr;
}

RunConfig RunConfig::defaults()
{
    RunConfig c;
    // waists giving xi_p = xi_s = xi_i = 0.55 at the matched pair of the default set
    c.beams.kind = BeamGeometry::Kind::waists;
    c.beams.values = {1.219585e-5, 1.707268e-5, 1.758554e-5};
    c.filters.fwhm_values = linspace(0.1e-9, 6.0e-9, 60);
    c.heralding.focal_values = linspace(0.5, 6.0, 111);
    c.poling.landscape_pump_fwhm = {1e-9, 2e-9, 4e-9, 8e-9, 12e-9, 16e-9};
    c.poling.landscape_length = {1e-3, 2e-3, 3e-3, 4e-3, 6e-3};
    c.presets = builtin_presets();
    return c;
}

MultiplexFitOptions MultiplexConfig::fit_options() const
{
    auto o = fit.options;
    o.model = model;
    o.dead_head = params.dead_head;
    o.dead_tail = params.dead_tail;
    o.final_bin = params.final_bin;
    o.seed = seed;
    return o;
}

CrystalSpec RunConfig::crystal_spec() const
{
    CrystalSpec s;
    s.length = crystal.length;
    s.period = crystal.period;
    s.qpm_order = crystal.qpm_order;
    s.chi2_eff = crystal.chi2_eff;
    s.efficiency = crystal.efficiency;
    s.axes = crystal.axes;
    s.temperature = crystal.temperature;
    if (auto it = dispersion_models.find(crystal.dispersion_model); it != dispersion_models.end()) {
        const auto& e = it->second;
        s.model = std::make_shared<const DispersionModel>(it->first, e.source, e.lambda_min, e.lambda_max, e.axes);
    } else {
        s.model = builtin_dispersion(crystal.dispersion_model);
    }
    if (!s.model) throw ConfigError("crystal.dispersion_model: unknown model '" + crystal.dispersion_model + "'");
    return s;
}

BeamGeometry RunConfig::beam_geometry() const
{
    const auto& v = beams.values;
    return beams.kind == BeamGeometry::Kind::waists ? BeamGeometry::from_waists(v[0], v[1], v[2])
                                                    : BeamGeometry::from_focal(v[0], v[1], v[2]);
}

void RunConfig::validate() const
{
    crystal_spec().validate();
    pump.validate();
    beam_geometry();
    if (grid.points < 2) throw ConfigError("grid.points must be >= 2");
    if (!(grid.span_fwhm > 0.0)) throw ConfigError("grid.span_fwhm must be > 0");

    for (auto c : {filters.signal_center, filters.idler_center})
        if (c && !(*c > 0.0)) throw ConfigError("filters: center wavelengths must be > 0");
    if (filters.fwhm_values.empty()) throw ConfigError("filters.fwhm_m: need at least one width");
    for (double w : filters.fwhm_values)
        if (!(w > 0.0)) throw ConfigError("filters.fwhm_m: widths must be > 0");
    if (!(filters.threshold > 0.0 && filters.threshold <= 1.0)) throw ConfigError("filters.threshold must be in (0, 1]");
    if (filters.resample_points < 8) throw ConfigError("filters.resample_points must be >= 8");
    if (!(filters.gaussian_span > 0.0)) throw ConfigError("filters.gaussian_span must be > 0");

    if (!(heralding.lambda_min > 0.0 && heralding.lambda_max >= heralding.lambda_min)) {
        throw ConfigError("heralding.lambda_min_m / lambda_max_m: need 0 < min <= max");
    }
    if (heralding.points < 1) throw ConfigError("heralding.points must be >= 1");
    if (heralding.focal_values.empty()) throw ConfigError("heralding.focal_values: need at least one value");
    for (double x : heralding.focal_values)
        if (!(x > 0.0)) throw ConfigError("heralding.focal_values: values must be > 0");
    if (heralding.jsi_grid_points < 3) throw ConfigError("heralding.jsi_grid_points must be >= 3");
    if (!(heralding.jsi_span_fwhm > 0.0)) throw ConfigError("heralding.jsi_span_fwhm must be > 0");

    if (!(poling.sigma_fraction > 0.0)) throw ConfigError("poling.sigma_fraction must be > 0");
    if (poling.grid_points < 8) throw ConfigError("poling.grid_points must be >= 8");
    if (!(poling.pump_span > 0.0)) throw ConfigError("poling.pump_span must be > 0");
    if (!(poling.pmf_half_width > 0.0)) throw ConfigError("poling.pmf_half_width_rad_per_m must be > 0");
    if (poling.pmf_points < 3) throw ConfigError("poling.pmf_points must be >= 3");
    for (double w : poling.landscape_pump_fwhm)
        if (!(w > 0.0)) throw ConfigError("poling.landscape.pump_fwhm_m: values must be > 0");
    for (double l : poling.landscape_length)
        if (!(l > 0.0)) throw ConfigError("poling.landscape.length_m: values must be > 0");

    multiplex.params.validate();
    multiplex.channels.validate();
    for (const auto& [name, p] : presets) {
        try {
            p.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("presets." + name + ": " + e.what());
        }
    }
    if (multiplex.n_min < 1 || multiplex.n_max < multiplex.n_min) {
        throw ConfigError("multiplex.n_min / n_max: need 1 <= n_min <= n_max");
    }
    if (multiplex.trials < 1) throw ConfigError("multiplex.trials must be >= 1");
    if (multiplex.fit.kind != "multiplexed" && multiplex.fit.kind != "loop_loss") {
        throw ConfigError("multiplex.fit.kind: expected 'multiplexed' or 'loop_loss', got '" + multiplex.fit.kind + "'");
    }
    if (multiplex.fit.options.starts < 1) throw ConfigError("multiplex.fit.starts must be >= 1");
    if (io.out_dir.empty()) throw ConfigError("io.out_dir must not be empty");
}

RunConfig parse(std::string_view text)
{
    json root;
    try {
        root = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    RunConfig c = RunConfig::defaults();
    Section top(root, "");

    top.object("dispersion_models", [&](Section& s) {
        for (auto it = s.raw().begin(); it != s.raw().end(); ++it) {
            if (builtin_dispersion(it.key())) {
                throw ConfigError("dispersion_models." + it.key() + ": name is reserved for a built-in set");
            }
            Section m(it.value(), "dispersion_models." + it.key());
            s.find(it.key().c_str());
            c.dispersion_models[it.key()] = parse_dispersion(m);
            m.finish();
        }
    });

    top.object("crystal", [&](Section& s) {
        s.number("length_m", c.crystal.length);
        s.number("period_m", c.crystal.period);
        s.integer("qpm_order", c.crystal.qpm_order);
        s.number("chi2_eff_m_per_v", c.crystal.chi2_eff);
        s.number("efficiency", c.crystal.efficiency);
        s.string("dispersion_model", c.crystal.dispersion_model);
        s.optional_number("temperature_c", c.crystal.temperature);
        s.object("axes", [&](Section& a) {
            a.string("pump", c.crystal.axes.pump);
            a.string("signal", c.crystal.axes.signal);
            a.string("idler", c.crystal.axes.idler);
        });
    });

    top.object("pump", [&](Section& s) {
        s.number("center_wavelength_m", c.pump.center_wavelength);
        s.number("fwhm_m", c.pump.fwhm);
        s.number("photon_number", c.pump.photon_number);
    });

    top.object("beams", [&](Section& s) {
        if (s.has("waists_m") == s.has("focal")) throw ConfigError("beams: give exactly one of waists_m, focal");
        const char* key = s.has("waists_m") ? "waists_m" : "focal";
        std::vector<double> v;
        s.number_list(key, v);
        if (v.size() != 3) throw ConfigError(s.key_path(key) + ": expected [pump, signal, idler]");
        c.beams.kind = s.has("waists_m") ? BeamGeometry::Kind::waists : BeamGeometry::Kind::focal;
        c.beams.values = {v[0], v[1], v[2]};
    });

    top.object("grid", [&](Section& s) {
        s.count("points", c.grid.points);
        s.number("span_fwhm", c.grid.span_fwhm);
    });

    top.object("filters", [&](Section& s) {
        std::string shape = to_string(c.filters.shape);
        s.string("shape", shape);
        try {
            c.filters.shape = parse_filter_shape(shape);
        } catch (const ConfigError&) {
            throw ConfigError("filters.shape: expected 'gaussian' or 'rectangular', got '" + shape + "'");
        }
        s.optional_number("signal_center_m", c.filters.signal_center);
        s.optional_number("idler_center_m", c.filters.idler_center);
        s.number_list("fwhm_m", c.filters.fwhm_values);
        s.number("threshold", c.filters.threshold);
        s.boolean("resample", c.filters.resample);
        s.count("resample_points", c.filters.resample_points);
        s.number("gaussian_span", c.filters.gaussian_span);
    });

    top.object("heralding", [&](Section& s) {
        s.number("lambda_min_m", c.heralding.lambda_min);
        s.number("lambda_max_m", c.heralding.lambda_max);
        s.count("points", c.heralding.points);
        s.number_list("focal_values", c.heralding.focal_values);
        std::string mode = name_of(c.heralding.focal_mode), triples = name_of(c.heralding.jsi_triples);
        s.string("focal_mode", mode);
        s.string("jsi_triples", triples);
        c.heralding.focal_mode = parse_enum<FocalMode>(s.key_path("focal_mode"), mode,
                                                       {{"symmetric", FocalMode::symmetric}, {"full", FocalMode::full}});
        c.heralding.jsi_triples = parse_enum<FocalTriples>(
            s.key_path("jsi_triples"), triples, {{"constrained", FocalTriples::constrained}, {"full", FocalTriples::full}});
        s.count("jsi_grid_points", c.heralding.jsi_grid_points);
        s.number("jsi_span_fwhm", c.heralding.jsi_span_fwhm);
    });

    top.object("poling", [&](Section& s) {
        s.number("sigma_fraction", c.poling.sigma_fraction);
        std::string scaling = to_string(c.poling.scaling);
        s.string("scaling", scaling);
        c.poling.scaling = parse_target_scaling(scaling);
        s.count("grid_points", c.poling.grid_points);
        s.number("pump_span", c.poling.pump_span);
        s.string("structure_file", c.poling.structure_file);
        s.number("pmf_half_width_rad_per_m", c.poling.pmf_half_width);
        s.count("pmf_points", c.poling.pmf_points);
        s.object("landscape", [&](Section& l) {
            l.number_list("pump_fwhm_m", c.poling.landscape_pump_fwhm);
            l.number_list("length_m", c.poling.landscape_length);
        });
    });

    top.object("presets", [&](Section& s) {
        for (auto it = s.raw().begin(); it != s.raw().end(); ++it) {
            s.find(it.key().c_str());
            Section p(it.value(), "presets." + it.key());
            MultiplexParams mp;
            parse_multiplex_params(p, mp);
            p.finish();
            c.presets[it.key()] = mp;
        }
    });

    top.object("multiplex", [&](Section& s) {
        if (s.has("preset")) {
            std::string name;
            s.string("preset", name);
            auto it = c.presets.find(name);
            if (it == c.presets.end()) throw ConfigError("multiplex.preset: unknown preset '" + name + "'");
            c.multiplex.params = it->second;
        }
        parse_multiplex_params(s, c.multiplex.params);
        std::string model = name_of(c.multiplex.model);
        s.string("model", model);
        c.multiplex.model = parse_enum<MultiplexModel>(
            s.key_path("model"), model, {{"plain", MultiplexModel::plain}, {"work_zone", MultiplexModel::work_zone}});
        s.integer("n_min", c.multiplex.n_min);
        s.integer("n_max", c.multiplex.n_max);
        s.u64("trials", c.multiplex.trials);
        s.u64("seed", c.multiplex.seed);
        s.object("channels", [&](Section& ch) {
            auto& e = c.multiplex.channels;
            ch.number("eta_t", e.eta_t);
            ch.number("eta_di", e.eta_di);
            ch.number("eta_ds", e.eta_ds);
            ch.number("eta_h", e.eta_h);
            ch.number("eta_v", e.eta_v);
            ch.string("singles_h_raw", e.singles_h_raw);
            ch.string("singles_v_raw", e.singles_v_raw);
            ch.number("singles_h_cps", e.singles_h_cps);
            ch.number("singles_v_cps", e.singles_v_cps);
        });
        s.object("fit", [&](Section& f) {
            auto& o = c.multiplex.fit.options;
            f.string("kind", c.multiplex.fit.kind);
            f.string("data_file", c.multiplex.fit.data_file);
            f.optional_number("fix_mu", o.fix_mu);
            f.optional_number("fix_eta", o.fix_eta);
            f.optional_number("fix_eta_sl", o.fix_eta_sl);
            f.number("mu0", o.mu0);
            f.number("eta0", o.eta0);
            f.number("eta_sl0", o.eta_sl0);
            f.integer("starts", o.starts);
        });
    });

    top.object("io", [&](Section& s) {
        s.string("out_dir", c.io.out_dir);
        s.boolean("complex_jsa", c.io.complex_jsa);
    });

    top.finish();
    c.validate();
    return c;
}

RunConfig load(const std::string& path)
{
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const DataError&) {
        throw ConfigError("config: cannot read '" + path + "'");
    }
    return parse(text);
}

std::string serialize(const RunConfig& c)
{
    json models = json::object();
    for (const auto& [name, e] : c.dispersion_models) models[name] = dump_dispersion(e);
    json presets = json::object();
    for (const auto& [name, p] : c.presets) presets[name] = dump_multiplex_params(p);

    const auto& o = c.multiplex.fit.options;
    json multiplex = dump_multiplex_params(c.multiplex.params);
    multiplex.update(json{{"model", name_of(c.multiplex.model)},
                          {"n_min", c.multiplex.n_min},
                          {"n_max", c.multiplex.n_max},
                          {"trials", c.multiplex.trials},
                          {"seed", c.multiplex.seed},
                          {"channels",
                           {{"eta_t", c.multiplex.channels.eta_t},
                            {"eta_di", c.multiplex.channels.eta_di},
                            {"eta_ds", c.multiplex.channels.eta_ds},
                            {"eta_h", c.multiplex.channels.eta_h},
                            {"eta_v", c.multiplex.channels.eta_v},
                            {"singles_h_raw", c.multiplex.channels.singles_h_raw},
                            {"singles_v_raw", c.multiplex.channels.singles_v_raw},
                            {"singles_h_cps", c.multiplex.channels.singles_h_cps},
                            {"singles_v_cps", c.multiplex.channels.singles_v_cps}}},
                          {"fit",
                           {{"kind", c.multiplex.fit.kind},
                            {"data_file", c.multiplex.fit.data_file},
                            {"fix_mu", optional_json(o.fix_mu)},
                            {"fix_eta", optional_json(o.fix_eta)},
                            {"fix_eta_sl", optional_json(o.fix_eta_sl)},
                            {"mu0", o.mu0},
                            {"eta0", o.eta0},
                            {"eta_sl0", o.eta_sl0},
                            {"starts", o.starts}}}});

    json root = {
        {"dispersion_models", models},
        {"crystal",
         {{"length_m", c.crystal.length},
          {"period_m", c.crystal.period},
          {"qpm_order", c.crystal.qpm_order},
          {"chi2_eff_m_per_v", c.crystal.chi2_eff},
          {"efficiency", c.crystal.efficiency},
          {"dispersion_model", c.crystal.dispersion_model},
          {"temperature_c", optional_json(c.crystal.temperature)},
          {"axes", {{"pump", c.crystal.axes.pump}, {"signal", c.crystal.axes.signal}, {"idler", c.crystal.axes.idler}}}}},
        {"pump",
         {{"center_wavelength_m", c.pump.center_wavelength},
          {"fwhm_m", c.pump.fwhm},
          {"photon_number", c.pump.photon_number}}},
        {"beams", {{c.beams.kind == BeamGeometry::Kind::waists ? "waists_m" : "focal", c.beams.values}}},
        {"grid", {{"points", c.grid.points}, {"span_fwhm", c.grid.span_fwhm}}},
        {"filters",
         {{"shape", to_string(c.filters.shape)},
          {"signal_center_m", optional_json(c.filters.signal_center)},
          {"idler_center_m", optional_json(c.filters.idler_center)},
          {"fwhm_m", c.filters.fwhm_values},
          {"threshold", c.filters.threshold},
          {"resample", c.filters.resample},
          {"resample_points", c.filters.resample_points},
          {"gaussian_span", c.filters.gaussian_span}}},
        {"heralding",
         {{"lambda_min_m", c.heralding.lambda_min},
          {"lambda_max_m", c.heralding.lambda_max},
          {"points", c.heralding.points},
          {"focal_values", c.heralding.focal_values},
          {"focal_mode", name_of(c.heralding.focal_mode)},
          {"jsi_triples", name_of(c.heralding.jsi_triples)},
          {"jsi_grid_points", c.heralding.jsi_grid_points},
          {"jsi_span_fwhm", c.heralding.jsi_span_fwhm}}},
        {"poling",
         {{"sigma_fraction", c.poling.sigma_fraction},
          {"scaling", to_string(c.poling.scaling)},
          {"grid_points", c.poling.grid_points},
          {"pump_span", c.poling.pump_span},
          {"structure_file", c.poling.structure_file},
          {"pmf_half_width_rad_per_m", c.poling.pmf_half_width},
          {"pmf_points", c.poling.pmf_points},
          {"landscape", {{"pump_fwhm_m", c.poling.landscape_pump_fwhm}, {"length_m", c.poling.landscape_length}}}}},
        {"presets", presets},
        {"multiplex", multiplex},
        {"io", {{"out_dir", c.io.out_dir}, {"complex_jsa", c.io.complex_jsa}}},
    };
    return root.dump(2) + "\n";
}

}  // namespace hsps::config
